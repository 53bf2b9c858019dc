//! Closed-form derivatives of eigenvalue branches: with respect to
//! boundary-condition chart coordinates (general and self-adjoint charts),
//! the separated angles, and the equation coefficients, plus the
//! Lagrange-type boundary identity.

use num_complex::Complex64;

use crate::bc::{BcError, BcTangent, BoundaryCondition, ChartId};
use crate::equation::SolutionSequence;
use crate::mat2::Mat2;
use crate::spectrum::{
    characteristic_polynomial, eigenfunction, is_self_adjoint_problem, EigenfunctionData,
    SpectrumError,
};
use crate::tol::SIMPLE_EIG_EPS;
use crate::transfer::TransferSystem;

#[derive(Clone, Debug, thiserror::Error)]
pub enum DerivError {
    #[error("eigenvalue is not simple within tolerance (|Gamma'| = {residual:e})")]
    NotSimple { residual: f64 },
    #[error("tangent/chart mismatch: {0}")]
    ChartTangentMismatch(String),
    #[error("boundary condition does not lie in the requested self-adjoint chart")]
    NotSelfAdjointChart,
    #[error("problem is not self-adjoint")]
    NotSelfAdjoint,
    #[error("boundary condition is not separated self-adjoint")]
    NotSeparatedSelfAdjoint,
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Bc(#[from] BcError),
}

/// Coefficient matrices `D`, `E` of the general derivative formula
/// `dΛ(H|L) = -Σ (d_jk h_jk + e_jk l_jk) / Γ'(λ*)`, built from the
/// adjugate patterns of the normalized representative and `Φ_N(λ*)`.
#[derive(Clone, Debug)]
pub struct BcDerivativeKernel {
    pub d: Mat2,
    pub e: Mat2,
}

pub fn bc_derivative_kernel(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
    lambda: Complex64,
) -> BcDerivativeKernel {
    let phi = ts.phi_end_at(lambda);
    let (p, q) = (phi.e[0][0], phi.e[0][1]);
    let (dp, dq) = (phi.e[1][0], phi.e[1][1]);
    let adj_a = bc.a.adjugate_transpose();
    let adj_b = bc.b.adjugate_transpose();
    let k1 = Mat2::new([[dq, -dp], [-q, p]]);
    let k2 = Mat2::new([[p, dp], [q, dq]]);
    BcDerivativeKernel {
        d: adj_a.add(&adj_b.mul(&k1)),
        e: adj_b.add(&adj_a.mul(&k2)),
    }
}

fn frobenius_pairing(m: &Mat2, x: &Mat2) -> Complex64 {
    let mut acc = Complex64::default();
    for i in 0..2 {
        for j in 0..2 {
            acc += m.e[i][j] * x.e[i][j];
        }
    }
    acc
}

/// Derivative of the simple eigenvalue branch through `lambda` in the
/// direction of a general-chart tangent. The boundary condition is
/// normalized into the tangent's chart so that numerator and denominator
/// use the same representative.
pub fn bc_derivative(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
    lambda: Complex64,
    tangent: &BcTangent,
) -> Result<Complex64, DerivError> {
    if tangent.chart.is_self_adjoint_chart() {
        return Err(DerivError::ChartTangentMismatch(format!(
            "{} is a self-adjoint chart; use the self-adjoint derivative",
            tangent.chart
        )));
    }
    let point = bc
        .to_chart(tangent.chart)
        .map_err(|e| DerivError::ChartTangentMismatch(e.to_string()))?;
    let normalized = point.reconstruct();
    let cp = characteristic_polynomial(ts, &normalized)?;
    let gamma_prime = cp.gamma.derivative();
    let gp = gamma_prime.eval(lambda);
    let scale = gamma_prime.eval_scale(lambda).max(f64::MIN_POSITIVE);
    if gp.norm() <= SIMPLE_EIG_EPS * scale {
        return Err(DerivError::NotSimple {
            residual: gp.norm(),
        });
    }
    let kernel = bc_derivative_kernel(ts, &normalized, lambda);
    let sum = frobenius_pairing(&kernel.d, &tangent.h) + frobenius_pairing(&kernel.e, &tangent.l);
    Ok(-sum / gp)
}

/// `(dΛ/dα, dΛ/dβ)` from a normalized eigenfunction of a separated
/// self-adjoint problem: `(-|y_0|² - |f_0Δy_0|², |y_N|² + |f_NΔy_N|²)`.
pub fn separated_derivative_values(ef: &EigenfunctionData) -> (f64, f64) {
    let n = ef.seq.n();
    let d_alpha = -(ef.seq.y[0].norm_sqr() + ef.seq.qd[0].norm_sqr());
    let d_beta = ef.seq.y[n].norm_sqr() + ef.seq.qd[n].norm_sqr();
    (d_alpha, d_beta)
}

/// Derivatives of the eigenvalue branch of `S_{α,β}` with respect to the
/// two angles. Always strictly negative in `α` and strictly positive in
/// `β`.
pub fn separated_derivatives(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
    lambda: Complex64,
) -> Result<(f64, f64), DerivError> {
    if !ts.equation().is_real_positive_weight() {
        return Err(DerivError::NotSeparatedSelfAdjoint);
    }
    if bc.separated_params().is_err() {
        return Err(DerivError::NotSeparatedSelfAdjoint);
    }
    let ef = eigenfunction(ts, bc, lambda)?;
    Ok(separated_derivative_values(&ef))
}

/// The Hermitian quadratic form of the self-adjoint chart derivative
/// formulas, evaluated on a normalized eigenfunction.
pub fn self_adjoint_form_value(
    chart: ChartId,
    ef: &EigenfunctionData,
    da: f64,
    dz: Complex64,
    db: f64,
) -> f64 {
    let n = ef.seq.n();
    let (v0, v1) = match chart {
        ChartId::O13 => (ef.seq.qd[0], ef.seq.qd[n]),
        ChartId::O14 => (ef.seq.qd[0], ef.seq.y[n]),
        ChartId::O23 => (ef.seq.y[0], ef.seq.qd[n]),
        ChartId::O24 => (ef.seq.y[0], ef.seq.y[n]),
        _ => unreachable!("general charts have no Hermitian form"),
    };
    da * v0.norm_sqr() + db * v1.norm_sqr() + 2.0 * (dz * v0 * v1.conj()).re
}

/// Derivative of the eigenvalue branch of a self-adjoint problem along a
/// self-adjoint chart tangent. Real by the Hermitian structure, and
/// nonnegative along each single real coordinate.
pub fn self_adjoint_bc_derivative(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
    lambda: Complex64,
    tangent: &BcTangent,
) -> Result<f64, DerivError> {
    if !tangent.chart.is_self_adjoint_chart() {
        return Err(DerivError::ChartTangentMismatch(format!(
            "{} is not a self-adjoint chart",
            tangent.chart
        )));
    }
    if !ts.equation().is_real_positive_weight() {
        return Err(DerivError::NotSelfAdjoint);
    }
    let point = bc
        .to_self_adjoint_chart(tangent.chart)
        .map_err(|_| DerivError::NotSelfAdjointChart)?;
    let normalized = point.reconstruct();
    ensure_simple(ts, &normalized, lambda)?;
    let ef = eigenfunction(ts, &normalized, lambda)?;
    let (da, dz, db) = tangent.self_adjoint_coords();
    Ok(self_adjoint_form_value(tangent.chart, &ef, da, dz, db))
}

/// A direction in the equation space: perturbations of `(1/f_n)` for
/// `n ∈ [0, N]`, of `q_n` and of `w_n` for `n ∈ [1, N]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationTangent {
    pub h: Vec<f64>,
    pub k: Vec<f64>,
    pub l: Vec<f64>,
}

impl EquationTangent {
    pub fn zero(n: usize) -> EquationTangent {
        EquationTangent {
            h: vec![0.0; n + 1],
            k: vec![0.0; n],
            l: vec![0.0; n],
        }
    }

    /// Unit direction along `1/f_index`.
    pub fn unit_inv_f(n: usize, index: usize) -> EquationTangent {
        let mut t = EquationTangent::zero(n);
        t.h[index] = 1.0;
        t
    }

    /// Unit direction along `q_index`, `index ∈ [1, N]`.
    pub fn unit_q(n: usize, index: usize) -> EquationTangent {
        let mut t = EquationTangent::zero(n);
        t.k[index - 1] = 1.0;
        t
    }

    /// Unit direction along `w_index`, `index ∈ [1, N]`.
    pub fn unit_w(n: usize, index: usize) -> EquationTangent {
        let mut t = EquationTangent::zero(n);
        t.l[index - 1] = 1.0;
        t
    }

    pub fn shape_matches(&self, n: usize) -> bool {
        self.h.len() == n + 1 && self.k.len() == n && self.l.len() == n
    }
}

/// The equation-direction derivative evaluated on a normalized
/// eigenfunction:
/// `-Σ_{n=0}^{N-1} |f_nΔy_n|² h_n + Σ |y_n|² k_n - λ* Σ |y_n|² l_n`.
/// The `h` sum stops at `N-1`: the branch does not depend on `f_N`.
pub fn equation_derivative_value(ef: &EigenfunctionData, tangent: &EquationTangent) -> f64 {
    let n = ef.seq.n();
    let mut acc = 0.0;
    for i in 0..n {
        acc -= ef.seq.qd[i].norm_sqr() * tangent.h[i];
    }
    for i in 1..=n {
        acc += ef.seq.y[i].norm_sqr() * (tangent.k[i - 1] - ef.lambda.re * tangent.l[i - 1]);
    }
    acc
}

/// Derivative of the eigenvalue branch of a self-adjoint problem along an
/// equation tangent `(h, k, l)`.
pub fn equation_derivative(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
    lambda: Complex64,
    tangent: &EquationTangent,
) -> Result<f64, DerivError> {
    if !is_self_adjoint_problem(ts, bc) {
        return Err(DerivError::NotSelfAdjoint);
    }
    if !tangent.shape_matches(ts.n()) {
        return Err(DerivError::ChartTangentMismatch(format!(
            "equation tangent sized for N = {}, expected N = {}",
            tangent.h.len().saturating_sub(1),
            ts.n()
        )));
    }
    ensure_simple(ts, bc, lambda)?;
    let ef = eigenfunction(ts, bc, lambda)?;
    Ok(equation_derivative_value(&ef, tangent))
}

fn ensure_simple(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
    lambda: Complex64,
) -> Result<(), DerivError> {
    let cp = characteristic_polynomial(ts, bc)?;
    let gamma_prime = cp.gamma.derivative();
    let gp = gamma_prime.eval(lambda);
    let scale = gamma_prime.eval_scale(lambda).max(f64::MIN_POSITIVE);
    if gp.norm() <= SIMPLE_EIG_EPS * scale {
        return Err(DerivError::NotSimple {
            residual: gp.norm(),
        });
    }
    Ok(())
}

/// Both sides of the Lagrange-type boundary identity
/// `u_0 (g_0Δv̄_0) - (f_0Δu_0) v̄_0 = u_N (g_NΔv̄_N) - (f_NΔu_N) v̄_N`
/// for eigenfunctions `u`, `v` of two problems sharing one self-adjoint
/// boundary condition. Diagnostic: returns the two boundary forms.
pub fn lagrange_form(u: &SolutionSequence, v: &SolutionSequence) -> (Complex64, Complex64) {
    debug_assert_eq!(u.n(), v.n(), "sequences must share N");
    let n = u.n();
    let left = u.y[0] * v.qd[0].conj() - u.qd[0] * v.y[0].conj();
    let right = u.y[n] * v.qd[n].conj() - u.qd[n] * v.y[n].conj();
    (left, right)
}

/// Central finite difference `(f(h) - f(-h)) / 2h`, with one Richardson
/// extrapolation step when `tight` flags a poorly separated eigenvalue.
pub fn central_difference<E>(
    f: impl Fn(f64) -> Result<Complex64, E>,
    h: f64,
    tight: bool,
) -> Result<Complex64, E> {
    let d = |step: f64| -> Result<Complex64, E> { Ok((f(step)? - f(-step)?) / (2.0 * step)) };
    if tight {
        let coarse = d(h)?;
        let fine = d(h / 2.0)?;
        Ok((fine * 4.0 - coarse) / 3.0)
    } else {
        d(h)
    }
}
