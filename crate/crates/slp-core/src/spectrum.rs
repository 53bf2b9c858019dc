//! The characteristic polynomial `Γ(λ) = det(A + B Φ_N(λ))`, the spectrum
//! with analytic and geometric multiplicities, eigenfunctions, and the
//! eigenvalue count `N - 2 + r` of self-adjoint problems.

use num_complex::Complex64;

use crate::bc::{BcError, BoundaryCondition};
use crate::equation::SolutionSequence;
use crate::mat2::{mat2_rank, Mat2};
use crate::poly::Polynomial;
use crate::roots::{cluster_roots, polynomial_roots};
use crate::tol::{
    CHAR_POLY_AGREE, CLUSTER_TAU, EIGENVALUE_TAU, NORMALIZATION_TOL, REAL_SNAP_TAU, WHOLE_PLANE_EPS,
};
use crate::transfer::{solve_ivp, TransferSystem};

#[derive(Clone, Debug, thiserror::Error)]
pub enum SpectrumError {
    #[error("the two characteristic-polynomial formulas disagree: max diff {max_diff:e} at scale {scale:e}")]
    FormulaMismatch { max_diff: f64, scale: f64 },
    #[error("root finding did not converge; partial spectrum available")]
    RootFindFailure { partial: Box<SpectrumReport> },
    #[error("{lambda} is not an eigenvalue (|Gamma| residual {residual:e})")]
    NotAnEigenvalue { lambda: Complex64, residual: f64 },
    #[error("eigenspace is two-dimensional; request a basis instead")]
    GeometricMultiplicityTwo,
    #[error(
        "problem is not self-adjoint (real positive weight + self-adjoint boundary condition)"
    )]
    NotSelfAdjoint,
    #[error("N = {n} exceeds the symbolic pencil limit {max}")]
    SizeLimit { n: usize, max: usize },
    #[error("the spectrum is the whole complex plane")]
    WholePlaneSpectrum,
    #[error(transparent)]
    Bc(#[from] BcError),
}

/// `Γ` computed along two independent routes: the 2x2 determinant of
/// `A + B Φ_N(λ)` and the cofactor sum `det A + det B + G(λ)`. The two must
/// agree coefficient-wise; disagreement signals an internal bug.
#[derive(Clone, Debug)]
pub struct CharacteristicPolynomial {
    pub gamma: Polynomial,
    pub via_cofactor_sum: Polynomial,
    /// Magnitude reference `(|A| + |B|) * max(1, transfer coefficient scale)`.
    pub scale: f64,
}

impl CharacteristicPolynomial {
    /// Whether `Γ` is numerically the zero polynomial, i.e. every complex
    /// number is an eigenvalue.
    pub fn is_whole_plane(&self) -> bool {
        self.gamma.max_coeff_magnitude() <= WHOLE_PLANE_EPS * self.scale
    }

    /// Whether `lambda` is a numerical zero of `Γ`.
    pub fn is_eigenvalue(&self, lambda: Complex64) -> bool {
        self.gamma.eval(lambda).norm() <= EIGENVALUE_TAU * self.gamma.eval_scale(lambda)
    }
}

/// One eigenvalue: its value, the order as a zero of `Γ` (analytic
/// multiplicity), and the eigenspace dimension (geometric multiplicity).
/// `certified` is false for analytic multiplicity three or higher, which
/// double precision cannot reliably distinguish.
#[derive(Clone, Copy, Debug)]
pub struct Eigenvalue {
    pub value: Complex64,
    pub analytic_mult: u32,
    pub geometric_mult: u32,
    pub certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumKind {
    Finite,
    WholePlane,
}

/// The complete spectrum of one problem, sorted by real then imaginary
/// part, or the whole-plane marker when `Γ` vanishes identically.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub kind: SpectrumKind,
    pub eigenvalues: Vec<Eigenvalue>,
    pub char_poly: CharacteristicPolynomial,
}

impl SpectrumReport {
    pub fn total_multiplicity(&self) -> u32 {
        self.eigenvalues.iter().map(|e| e.analytic_mult).sum()
    }

    /// The eigenvalue closest to `lambda`, if any.
    pub fn nearest(&self, lambda: Complex64) -> Option<&Eigenvalue> {
        self.eigenvalues.iter().min_by(|a, b| {
            (a.value - lambda)
                .norm()
                .total_cmp(&(b.value - lambda).norm())
        })
    }
}

/// Both characteristic-polynomial routes, with the agreement invariant
/// enforced. Coefficients depend on the representative `(A, B)` only up to
/// one global nonzero factor.
pub fn characteristic_polynomial(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
) -> Result<CharacteristicPolynomial, SpectrumError> {
    bc.check_rank2()?;
    let phi = ts.phi_end();
    let (phi11, psi11) = (&phi.e[0][0], &phi.e[0][1]);
    let (dphi, dpsi) = (&phi.e[1][0], &phi.e[1][1]);

    // Route 1: 2x2 determinant of A + B Φ_N(λ).
    let mut m = [
        [Polynomial::zero(), Polynomial::zero()],
        [Polynomial::zero(), Polynomial::zero()],
    ];
    for i in 0..2 {
        let row_b = [bc.b.e[i][0], bc.b.e[i][1]];
        m[i][0] = phi11
            .scale(row_b[0])
            .add(&dphi.scale(row_b[1]))
            .add(&Polynomial::constant(bc.a.e[i][0]));
        m[i][1] = psi11
            .scale(row_b[0])
            .add(&dpsi.scale(row_b[1]))
            .add(&Polynomial::constant(bc.a.e[i][1]));
    }
    let gamma = m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0]));

    // Route 2: det A + det B + G(λ) with C = B^T adj(A)^T.
    let c = bc.b.transpose().mul(&bc.a.adjugate_transpose());
    let g = phi11
        .scale(c.e[0][0])
        .add(&psi11.scale(c.e[0][1]))
        .add(&dphi.scale(c.e[1][0]))
        .add(&dpsi.scale(c.e[1][1]));
    let via = g.add(&Polynomial::constant(bc.a.det() + bc.b.det()));

    let scale = (bc.a.max_abs() + bc.b.max_abs()) * ts.coefficient_scale().max(1.0);
    let reference = gamma
        .max_coeff_magnitude()
        .max(via.max_coeff_magnitude())
        .max(1e-3 * scale);
    let max_diff = gamma.sub(&via).max_coeff_magnitude();
    if max_diff > CHAR_POLY_AGREE * reference {
        return Err(SpectrumError::FormulaMismatch { max_diff, scale });
    }
    Ok(CharacteristicPolynomial {
        gamma,
        via_cofactor_sum: via,
        scale,
    })
}

/// Whether equation and boundary condition together form a self-adjoint
/// problem (real positive weight paired with a self-adjoint condition).
pub fn is_self_adjoint_problem(ts: &TransferSystem, bc: &BoundaryCondition) -> bool {
    ts.equation().is_real_positive_weight() && bc.is_self_adjoint()
}

/// `A + B Φ_N(λ)` together with the worst-case magnitude bound of its
/// computation, the reference for separating genuine entries from
/// cancellation noise.
pub fn boundary_matrix(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
    lambda: Complex64,
) -> (Mat2, f64) {
    let phi = ts.phi_end_at(lambda);
    let m = bc.a.add(&bc.b.mul(&phi));
    let worst = bc.a.max_abs() + bc.b.max_abs() * phi.max_abs().max(1.0);
    (m, worst.max(f64::MIN_POSITIVE))
}

/// Dimension of the solution space of the boundary system at `lambda`,
/// `2 - rank(A + B Φ_N(λ))`. A matrix entirely at the cancellation-noise
/// level of its own computation is rank zero (the unique
/// geometric-multiplicity-two condition); anything above that level is
/// ranked against its own magnitude.
pub fn kernel_dimension(ts: &TransferSystem, bc: &BoundaryCondition, lambda: Complex64) -> u32 {
    let (m, worst) = boundary_matrix(ts, bc, lambda);
    if m.max_abs() <= crate::tol::BOUNDARY_NOISE_EPS * worst {
        return 2;
    }
    2 - mat2_rank(&m, m.max_abs()) as u32
}

/// Geometric multiplicity of a verified eigenvalue.
pub fn geometric_multiplicity(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
    lambda: Complex64,
) -> Result<u32, SpectrumError> {
    let cp = characteristic_polynomial(ts, bc)?;
    if !cp.is_whole_plane() && !cp.is_eigenvalue(lambda) {
        return Err(SpectrumError::NotAnEigenvalue {
            lambda,
            residual: cp.gamma.eval(lambda).norm(),
        });
    }
    Ok(kernel_dimension(ts, bc, lambda).max(1))
}

/// The full spectrum: roots of `Γ` clustered into multiple eigenvalues,
/// each carrying its geometric multiplicity, with self-adjoint problems
/// snapped to the real axis.
pub fn eigenvalues(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
) -> Result<SpectrumReport, SpectrumError> {
    let cp = characteristic_polynomial(ts, bc)?;
    if cp.is_whole_plane() {
        return Ok(SpectrumReport {
            kind: SpectrumKind::WholePlane,
            eigenvalues: vec![],
            char_poly: cp,
        });
    }
    let self_adjoint = is_self_adjoint_problem(ts, bc);
    let roots = match polynomial_roots(&cp.gamma) {
        Ok(r) => r,
        Err(failure) => {
            let partial = assemble_report(ts, bc, &cp, &failure.partial, self_adjoint);
            return Err(SpectrumError::RootFindFailure {
                partial: Box::new(partial),
            });
        }
    };
    Ok(assemble_report(ts, bc, &cp, &roots, self_adjoint))
}

fn assemble_report(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
    cp: &CharacteristicPolynomial,
    roots: &[Complex64],
    self_adjoint: bool,
) -> SpectrumReport {
    let mut eigenvalues = Vec::new();
    for cluster in cluster_roots(roots) {
        let mut value = cluster.value;
        let analytic = cluster.multiplicity as u32;
        if self_adjoint && value.im.abs() <= REAL_SNAP_TAU * value.norm().max(1.0) {
            value.im = 0.0;
        }
        let mut geometric = kernel_dimension(ts, bc, value).max(1);
        // Cross-check the cluster size against derivative smallness.
        let mut certified = analytic <= 2;
        if analytic >= 2 {
            let derivs = cp.gamma.eval_derivatives(value, (analytic - 1) as usize);
            let scale = cp.gamma.eval_scale(value);
            let mut factorial = 1.0;
            for (k, d) in derivs.iter().enumerate() {
                if k > 0 {
                    factorial *= k as f64;
                }
                if d.norm() > EIGENVALUE_TAU * factorial * scale {
                    certified = false;
                }
            }
        }
        if self_adjoint && geometric != analytic {
            // Analytic and geometric multiplicities of self-adjoint problems
            // coincide; the cluster count is the arbiter.
            geometric = analytic.min(2);
        }
        eigenvalues.push(Eigenvalue {
            value,
            analytic_mult: analytic,
            geometric_mult: geometric,
            certified,
        });
    }
    eigenvalues.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    SpectrumReport {
        kind: SpectrumKind::Finite,
        eigenvalues,
        char_poly: cp.clone(),
    }
}

/// Eigenvalue count of the spectrum inside the open disc of `radius`
/// around `center`, counting analytic multiplicity.
pub fn count_in_region(
    report: &SpectrumReport,
    center: Complex64,
    radius: f64,
) -> Result<u32, SpectrumError> {
    if report.kind == SpectrumKind::WholePlane {
        return Err(SpectrumError::WholePlaneSpectrum);
    }
    Ok(report
        .eigenvalues
        .iter()
        .filter(|e| (e.value - center).norm() < radius)
        .map(|e| e.analytic_mult)
        .sum())
}

/// An eigenfunction `y = c1 φ(λ) + c2 ψ(λ)`, normalized for self-adjoint
/// problems so that `Σ w_n |y_n|^2 = 1` with the dominant component made
/// positive real.
#[derive(Clone, Debug)]
pub struct EigenfunctionData {
    pub lambda: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub seq: SolutionSequence,
    pub normalized: bool,
}

impl EigenfunctionData {
    /// Weighted norm square `Σ_{n=1..N} w_n |y_n|^2`.
    pub fn weighted_norm_sq(&self, ts: &TransferSystem) -> f64 {
        let eq = ts.equation();
        (1..=eq.n())
            .map(|n| eq.w_at(n).re * self.seq.y[n].norm_sqr())
            .sum()
    }

    /// Rotates the whole eigenfunction by a unit phase; derivative formulas
    /// built from it must be invariant under this.
    pub fn rotated(&self, phase: f64) -> EigenfunctionData {
        let s = Complex64::from_polar(1.0, phase);
        EigenfunctionData {
            lambda: self.lambda,
            c1: self.c1 * s,
            c2: self.c2 * s,
            seq: self.seq.scale(s),
            normalized: self.normalized,
        }
    }
}

/// The eigenfunction at a geometrically simple eigenvalue. The coefficient
/// pair comes from the adjugate pattern of the row of `A + B Φ_N(λ)`
/// holding the largest-magnitude entry, which varies continuously with the
/// problem.
pub fn eigenfunction(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
    lambda: Complex64,
) -> Result<EigenfunctionData, SpectrumError> {
    let cp = characteristic_polynomial(ts, bc)?;
    if !cp.is_whole_plane() && !cp.is_eigenvalue(lambda) {
        return Err(SpectrumError::NotAnEigenvalue {
            lambda,
            residual: cp.gamma.eval(lambda).norm(),
        });
    }
    if kernel_dimension(ts, bc, lambda) == 2 {
        return Err(SpectrumError::GeometricMultiplicityTwo);
    }
    let (m, _) = boundary_matrix(ts, bc, lambda);
    let mut pivot = (0usize, 0.0f64);
    for i in 0..2 {
        for j in 0..2 {
            if m.e[i][j].norm() > pivot.1 {
                pivot = (i, m.e[i][j].norm());
            }
        }
    }
    let row = pivot.0;
    let (c1, c2) = (m.e[row][1], -m.e[row][0]);
    Ok(build_eigenfunction(ts, bc, lambda, c1, c2))
}

/// A basis of the eigenspace: one eigenfunction at a geometrically simple
/// eigenvalue, the two transfer columns when the eigenspace is
/// two-dimensional (any coefficient pair solves the boundary system there).
pub fn eigenspace_basis(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
    lambda: Complex64,
) -> Result<Vec<EigenfunctionData>, SpectrumError> {
    match eigenfunction(ts, bc, lambda) {
        Ok(single) => Ok(vec![single]),
        Err(SpectrumError::GeometricMultiplicityTwo) => {
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::default();
            Ok(vec![
                build_eigenfunction(ts, bc, lambda, one, zero),
                build_eigenfunction(ts, bc, lambda, zero, one),
            ])
        }
        Err(e) => Err(e),
    }
}

fn build_eigenfunction(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
    lambda: Complex64,
    c1: Complex64,
    c2: Complex64,
) -> EigenfunctionData {
    let eq = ts.equation();
    let seq = solve_ivp(eq, lambda, 0, c1, c2);
    let mut data = EigenfunctionData {
        lambda,
        c1,
        c2,
        seq,
        normalized: false,
    };
    if is_self_adjoint_problem(ts, bc) {
        let norm = data.weighted_norm_sq(ts).sqrt();
        if norm > 0.0 {
            let mut seq = data.seq.scale(Complex64::new(1.0 / norm, 0.0));
            // Fix the phase: first component of largest magnitude positive real.
            let mut idx = 0;
            let mut best = 0.0;
            for (k, v) in seq.y.iter().enumerate() {
                if v.norm() > best + NORMALIZATION_TOL {
                    best = v.norm();
                    idx = k;
                }
            }
            let phase = seq.y[idx].arg();
            seq = seq.scale(Complex64::from_polar(1.0, -phase));
            data = EigenfunctionData {
                lambda,
                c1: seq.y[0],
                c2: seq.qd[0],
                seq,
                normalized: true,
            };
        }
    }
    data
}

/// The reduction data of a self-adjoint problem: rank `r` and determinant
/// `κ` of `[[-a11 + f0 a12, b12], [-a21 + f0 a22, b22]]`, and the resulting
/// eigenvalue total `N - 2 + r`.
#[derive(Clone, Debug)]
pub struct SelfAdjointCount {
    pub r: u32,
    pub kappa: Complex64,
    pub expected_total: u32,
}

pub fn self_adjoint_count(
    ts: &TransferSystem,
    bc: &BoundaryCondition,
) -> Result<SelfAdjointCount, SpectrumError> {
    if !is_self_adjoint_problem(ts, bc) {
        return Err(SpectrumError::NotSelfAdjoint);
    }
    let f0 = ts.equation().f_at(0);
    let m = Mat2::new([
        [-bc.a.e[0][0] + f0 * bc.a.e[0][1], bc.b.e[0][1]],
        [-bc.a.e[1][0] + f0 * bc.a.e[1][1], bc.b.e[1][1]],
    ]);
    let scale = bc.scale_ref() * (1.0 + f0.norm());
    let r = mat2_rank(&m, scale.max(f64::MIN_POSITIVE)) as u32;
    Ok(SelfAdjointCount {
        r,
        kappa: m.det(),
        expected_total: (ts.n() as u32) - 2 + r,
    })
}

/// Matches two finite spectra as multisets: greatest distance between
/// paired eigenvalues (repeated per analytic multiplicity), infinite on
/// count mismatch. Used by the oracle comparisons.
pub fn spectrum_multiset_distance(a: &SpectrumReport, b: &SpectrumReport) -> f64 {
    let expand = |r: &SpectrumReport| -> Vec<Complex64> {
        let mut v = Vec::new();
        for e in &r.eigenvalues {
            for _ in 0..e.analytic_mult {
                v.push(e.value);
            }
        }
        v
    };
    let (xa, xb) = (expand(a), expand(b));
    if xa.len() != xb.len() {
        return f64::INFINITY;
    }
    xa.iter()
        .zip(&xb)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

/// Clustering tolerance at `lambda`, exposed for tests that reason about
/// multiplicity resolution.
pub fn cluster_radius(lambda: Complex64) -> f64 {
    CLUSTER_TAU * lambda.norm().max(1.0)
}
