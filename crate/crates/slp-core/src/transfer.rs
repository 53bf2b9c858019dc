//! Transfer matrices of the equation, built symbolically in the spectral
//! parameter, and initial-value solutions.
//!
//! `Φ_n(λ)` maps `(y_0, f_0 Δy_0)` to `(y_n, f_n Δy_n)` along solutions;
//! its first column is the fundamental solution `φ` with initial data
//! `(1, 0)`, its second the solution `ψ` with initial data `(0, 1)`, and
//! `det Φ_n(λ) = 1` identically.

use num_complex::Complex64;

use crate::equation::{SlEquation, SolutionSequence};
use crate::mat2::Mat2;
use crate::poly::Polynomial;

/// A 2x2 matrix of polynomials in `λ`.
#[derive(Clone, Debug)]
pub struct PolyMat2 {
    pub e: [[Polynomial; 2]; 2],
}

impl PolyMat2 {
    pub fn identity() -> Self {
        let one = Polynomial::constant(Complex64::new(1.0, 0.0));
        let zero = Polynomial::zero();
        PolyMat2 {
            e: [[one.clone(), zero.clone()], [zero, one]],
        }
    }

    pub fn mul(&self, other: &PolyMat2) -> PolyMat2 {
        let mut out = PolyMat2 {
            e: [
                [Polynomial::zero(), Polynomial::zero()],
                [Polynomial::zero(), Polynomial::zero()],
            ],
        };
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] = self.e[i][0]
                    .mul(&other.e[0][j])
                    .add(&self.e[i][1].mul(&other.e[1][j]));
            }
        }
        out
    }

    pub fn eval(&self, lambda: Complex64) -> Mat2 {
        Mat2::new([
            [self.e[0][0].eval(lambda), self.e[0][1].eval(lambda)],
            [self.e[1][0].eval(lambda), self.e[1][1].eval(lambda)],
        ])
    }

    /// `det` as a polynomial; identically 1 for transfer matrices.
    pub fn det_poly(&self) -> Polynomial {
        self.e[0][0]
            .mul(&self.e[1][1])
            .sub(&self.e[0][1].mul(&self.e[1][0]))
    }

    pub fn max_coeff_magnitude(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|p| p.max_coeff_magnitude())
            .fold(0.0, f64::max)
    }
}

/// The sequence `Φ_0..Φ_N` of transfer matrices of one equation, built once
/// and evaluated at as many `λ` as needed downstream.
#[derive(Clone, Debug)]
pub struct TransferSystem {
    eq: SlEquation,
    phi: Vec<PolyMat2>,
}

impl TransferSystem {
    /// Builds the full transfer sequence by the one-step recursion
    /// `Φ_n = [[1, 1/f_{n-1}], [q_n - λw_n, 1 + (q_n - λw_n)/f_{n-1}]] Φ_{n-1}`.
    pub fn build(eq: &SlEquation) -> TransferSystem {
        let n = eq.n();
        let mut phi = Vec::with_capacity(n + 1);
        phi.push(PolyMat2::identity());
        for k in 1..=n {
            let step = step_matrix(eq, k);
            let next = step.mul(&phi[k - 1]);
            phi.push(next);
        }
        TransferSystem {
            eq: eq.clone(),
            phi,
        }
    }

    pub fn equation(&self) -> &SlEquation {
        &self.eq
    }

    pub fn n(&self) -> usize {
        self.eq.n()
    }

    /// `Φ_k` as a polynomial matrix, `k ∈ [0, N]`.
    pub fn phi(&self, k: usize) -> &PolyMat2 {
        &self.phi[k]
    }

    /// The terminal matrix `Φ_N`.
    pub fn phi_end(&self) -> &PolyMat2 {
        &self.phi[self.eq.n()]
    }

    pub fn phi_end_at(&self, lambda: Complex64) -> Mat2 {
        self.phi_end().eval(lambda)
    }

    /// Largest coefficient magnitude over the entries of `Φ_N`, the scale
    /// reference for characteristic-polynomial thresholds.
    pub fn coefficient_scale(&self) -> f64 {
        self.phi_end().max_coeff_magnitude()
    }
}

fn step_matrix(eq: &SlEquation, n: usize) -> PolyMat2 {
    let one = Complex64::new(1.0, 0.0);
    let inv_f = one / eq.f_at(n - 1);
    // q_n - λ w_n as a degree-1 polynomial.
    let qw = Polynomial::new(vec![eq.q_at(n), -eq.w_at(n)]);
    PolyMat2 {
        e: [
            [Polynomial::constant(one), Polynomial::constant(inv_f)],
            [qw.clone(), Polynomial::constant(one).add(&qw.scale(inv_f))],
        ],
    }
}

/// Leading coefficients of the four entries of `Φ_N`: the `λ^{N-1}`
/// coefficients of `φ_N` and `ψ_N` and the `λ^N` coefficients of
/// `f_N Δφ_N` and `f_N Δψ_N`.
pub fn leading_terms(ts: &TransferSystem) -> [Complex64; 4] {
    let n = ts.n();
    let phi = ts.phi_end();
    [
        phi.e[0][0].coeff(n - 1),
        phi.e[0][1].coeff(n - 1),
        phi.e[1][0].coeff(n),
        phi.e[1][1].coeff(n),
    ]
}

/// The closed forms the leading terms must match:
/// `(-1)^{N-1} Π w_i/f_i`, the same over `f_0`, and the degree-`N` pair
/// carrying an extra `-w_N` factor.
pub fn leading_terms_closed_form(eq: &SlEquation) -> [Complex64; 4] {
    let n = eq.n();
    let mut prod = Complex64::new(1.0, 0.0);
    for i in 1..n {
        prod *= eq.w_at(i) / eq.f_at(i);
    }
    let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let head = prod * sign;
    let tail = -head * eq.w_at(n);
    [head, head / eq.f_at(0), tail, tail / eq.f_at(0)]
}

/// The unique solution of the equation at `lambda` with prescribed data
/// `(y_m, f_m Δy_m) = (z_m, z_m_qd)`, extended to indices `0..=N+1` by the
/// one-step recursion forward and its explicit unit-determinant inverse
/// backward.
pub fn solve_ivp(
    eq: &SlEquation,
    lambda: Complex64,
    m: usize,
    z_m: Complex64,
    z_m_qd: Complex64,
) -> SolutionSequence {
    let n = eq.n();
    assert!(m <= n, "anchor index {m} out of range 0..={n}");
    let mut y = vec![Complex64::default(); n + 2];
    let mut qd = vec![Complex64::default(); n + 1];
    y[m] = z_m;
    qd[m] = z_m_qd;

    // Forward: (y_k, qd_k) from (y_{k-1}, qd_{k-1}) for k in m+1..=N.
    for k in (m + 1)..=n {
        let c = eq.q_at(k) - lambda * eq.w_at(k);
        let f_prev = eq.f_at(k - 1);
        y[k] = y[k - 1] + qd[k - 1] / f_prev;
        qd[k] = c * y[k - 1] + (Complex64::new(1.0, 0.0) + c / f_prev) * qd[k - 1];
    }
    // Backward: invert the unit-determinant one-step matrix analytically.
    for k in (0..m).rev() {
        let c = eq.q_at(k + 1) - lambda * eq.w_at(k + 1);
        let f_prev = eq.f_at(k);
        let d = Complex64::new(1.0, 0.0) + c / f_prev;
        y[k] = d * y[k + 1] - qd[k + 1] / f_prev;
        qd[k] = -c * y[k + 1] + qd[k + 1];
    }
    // Extend to y_{N+1} through qd_N = f_N (y_{N+1} - y_N).
    y[n + 1] = y[n] + qd[n] / eq.f_at(n);
    SolutionSequence { y, qd }
}

/// The fundamental solutions `φ(λ)` (initial data `(1, 0)`) and `ψ(λ)`
/// (initial data `(0, 1)`), whose boundary values are the columns of `Φ`.
#[derive(Clone, Debug)]
pub struct FundamentalPair {
    pub lambda: Complex64,
    pub phi_seq: SolutionSequence,
    pub psi_seq: SolutionSequence,
}

impl FundamentalPair {
    pub fn at(eq: &SlEquation, lambda: Complex64) -> FundamentalPair {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::default();
        FundamentalPair {
            lambda,
            phi_seq: solve_ivp(eq, lambda, 0, one, zero),
            psi_seq: solve_ivp(eq, lambda, 0, zero, one),
        }
    }

    /// The combination `c1 φ + c2 ψ`, i.e. the solution with initial data
    /// `(c1, c2)`.
    pub fn combine(&self, c1: Complex64, c2: Complex64) -> SolutionSequence {
        let y = self
            .phi_seq
            .y
            .iter()
            .zip(&self.psi_seq.y)
            .map(|(&a, &b)| c1 * a + c2 * b)
            .collect();
        let qd = self
            .phi_seq
            .qd
            .iter()
            .zip(&self.psi_seq.qd)
            .map(|(&a, &b)| c1 * a + c2 * b)
            .collect();
        SolutionSequence { y, qd }
    }
}

/// Residual of the difference equation at interior index `n`, for tests and
/// postcondition checks: `-(qd_n - qd_{n-1}) + (q_n - λ w_n) y_n`.
pub fn equation_residual(
    eq: &SlEquation,
    lambda: Complex64,
    s: &SolutionSequence,
    n: usize,
) -> Complex64 {
    -(s.qd[n] - s.qd[n - 1]) + (eq.q_at(n) - lambda * eq.w_at(n)) * s.y[n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::EquationClass;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fourier(w2: f64) -> SlEquation {
        SlEquation::from_real(
            &[1.0, 1.0, 1.0],
            &[0.0, 0.0],
            &[1.0, w2],
            EquationClass::RealPositiveWeight,
        )
    }

    fn assert_poly(p: &Polynomial, coeffs: &[f64]) {
        for (k, &want) in coeffs.iter().enumerate() {
            assert!(
                (p.coeff(k) - c(want, 0.0)).norm() < 1e-12,
                "coeff {k}: got {}, want {}",
                p.coeff(k),
                want
            );
        }
        for k in coeffs.len()..p.coeffs.len() {
            assert!(p.coeff(k).norm() < 1e-12);
        }
    }

    #[test]
    fn transfer_starts_at_identity() {
        let ts = TransferSystem::build(&fourier(1.0));
        let id = ts.phi(0).eval(c(0.7, -0.3));
        assert!((id.e[0][0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(id.e[0][1].norm() < 1e-15);
        assert!(id.e[1][0].norm() < 1e-15);
        assert!((id.e[1][1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fourier_phi_1_matches_printed_matrix() {
        // Φ_1(λ) = [[1, 1], [-λ, 1-λ]]
        let ts = TransferSystem::build(&fourier(1.0));
        let p = ts.phi(1);
        assert_poly(&p.e[0][0], &[1.0]);
        assert_poly(&p.e[0][1], &[1.0]);
        assert_poly(&p.e[1][0], &[0.0, -1.0]);
        assert_poly(&p.e[1][1], &[1.0, -1.0]);
    }

    #[test]
    fn fourier_phi_2_matches_printed_matrix() {
        // Φ_2(λ) = [[1-λ, 2-λ], [-2λ+λ², 1-3λ+λ²]] at w2 = 1
        let ts = TransferSystem::build(&fourier(1.0));
        let p = ts.phi(2);
        assert_poly(&p.e[0][0], &[1.0, -1.0]);
        assert_poly(&p.e[0][1], &[2.0, -1.0]);
        assert_poly(&p.e[1][0], &[0.0, -2.0, 1.0]);
        assert_poly(&p.e[1][1], &[1.0, -3.0, 1.0]);
    }

    #[test]
    fn fourier_phi_2_general_weight() {
        // Φ_2(λ) = [[1-λ, 2-λ], [-(1+w2)λ + w2λ², 1-(1+2w2)λ + w2λ²]]
        let w2 = 0.6;
        let ts = TransferSystem::build(&fourier(w2));
        let p = ts.phi(2);
        assert_poly(&p.e[0][0], &[1.0, -1.0]);
        assert_poly(&p.e[0][1], &[2.0, -1.0]);
        assert_poly(&p.e[1][0], &[0.0, -(1.0 + w2), w2]);
        assert_poly(&p.e[1][1], &[1.0, -(1.0 + 2.0 * w2), w2]);
    }

    #[test]
    fn fourier_leading_terms() {
        let ts = TransferSystem::build(&fourier(1.0));
        let lead = leading_terms(&ts);
        assert!((lead[0] - c(-1.0, 0.0)).norm() < 1e-12); // φ_2: coeff of λ
        assert!((lead[3] - c(1.0, 0.0)).norm() < 1e-12); // f_2Δψ_2: coeff of λ²
        let closed = leading_terms_closed_form(&fourier(1.0));
        for i in 0..4 {
            assert!((lead[i] - closed[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn leading_term_with_nonunit_f0() {
        // N=2, f=(2,1,1), w=(1,1): ψ_2 leading = -1/f_0 = -1/2.
        let eq = SlEquation::from_real(
            &[2.0, 1.0, 1.0],
            &[0.0, 0.0],
            &[1.0, 1.0],
            EquationClass::RealPositiveWeight,
        );
        let ts = TransferSystem::build(&eq);
        let lead = leading_terms(&ts);
        assert!((lead[1] - c(-0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ivp_from_initial_data_reproduces_phi_column() {
        let eq = fourier(1.0);
        let ts = TransferSystem::build(&eq);
        let lambda = c(0.4, 0.9);
        let s = solve_ivp(&eq, lambda, 0, c(1.0, 0.0), c(0.0, 0.0));
        for k in 0..=2 {
            let m = ts.phi(k).eval(lambda);
            assert!((s.y[k] - m.e[0][0]).norm() < 1e-12);
            assert!((s.qd[k] - m.e[1][0]).norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_at_zero_has_constant_solution() {
        let eq = fourier(1.0);
        let s = solve_ivp(&eq, c(0.0, 0.0), 0, c(1.0, 0.0), c(0.0, 0.0));
        for v in &s.y {
            assert!((v - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn backward_solve_reproduces_forward_solution() {
        let eq = SlEquation::from_real(
            &[2.0, -1.5, 0.7, 1.0, -3.0],
            &[0.5, -1.0, 2.0, 0.3],
            &[1.0, 2.0, 0.8, 1.5],
            EquationClass::RealPositiveWeight,
        );
        let n = eq.n();
        let lambda = c(1.3, -0.2);
        let fwd = solve_ivp(&eq, lambda, 0, c(0.3, 0.1), c(-1.0, 0.7));
        let back = solve_ivp(&eq, lambda, n, fwd.y[n], fwd.qd[n]);
        let scale = fwd.max_abs();
        for k in 0..=n + 1 {
            assert!((fwd.y[k] - back.y[k]).norm() < 1e-9 * scale);
        }
        for k in 0..=n {
            assert!((fwd.qd[k] - back.qd[k]).norm() < 1e-9 * scale);
        }
        for k in 1..=n {
            let r = equation_residual(&eq, lambda, &back, k);
            assert!(r.norm() < 1e-9 * scale.max(1.0));
        }
    }
}
