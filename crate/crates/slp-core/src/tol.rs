//! Numeric thresholds used across the crate.
//!
//! All arithmetic is complex double precision. Degree, rank, and multiplicity
//! decisions are made against these relative thresholds rather than exact
//! comparisons; each constant documents the quantity it scales against.

/// Relative threshold for the numeric degree of a polynomial: a coefficient
/// counts as nonzero when its magnitude exceeds this fraction of the largest
/// coefficient magnitude. The transfer recursion amplifies rounding by O(N)
/// factors, so this sits well above machine epsilon.
pub const NUMERIC_DEGREE_TAU: f64 = 1e-10;

/// Relative threshold for rank decisions on 2x2 and 2x4 matrices, scaled by
/// a caller-supplied magnitude reference.
pub const RANK_EPS: f64 = 1e-8;

/// Cancellation-noise level of `A + B Φ_N(λ)` relative to its worst-case
/// magnitude bound: roughly machine epsilon amplified by the recursion
/// length, with two orders of margin. A boundary matrix entirely below
/// this is the geometric-multiplicity-two case; anything above it is
/// ranked against its own magnitude.
pub const BOUNDARY_NOISE_EPS: f64 = 1e-13;

/// Relative threshold for the self-adjointness test
/// `|A E A* - B E B*| <= SELF_ADJOINT_EPS * (|A|^2 + |B|^2)`.
pub const SELF_ADJOINT_EPS: f64 = 1e-10;

/// Relative threshold for classification and chart-coordinate reality checks.
pub const CLASS_EPS: f64 = 1e-10;

/// Relative agreement required between the determinant form and the
/// cofactor-sum form of the characteristic polynomial.
pub const CHAR_POLY_AGREE: f64 = 1e-9;

/// Whole-plane detection: all characteristic coefficients below
/// `WHOLE_PLANE_EPS * (|A| + |B|) * max(1, transfer coefficient scale)`.
pub const WHOLE_PLANE_EPS: f64 = 1e-12;

/// Root clustering radius, relative to `max(1, |lambda|)`. Double roots
/// perturbed by rounding split by about sqrt(eps), comfortably below this.
pub const CLUSTER_TAU: f64 = 1e-6;

/// Eigenvalue membership test `|Gamma(lambda)| <= EIGENVALUE_TAU * scale`
/// with scale the polynomial magnitude at `lambda`.
pub const EIGENVALUE_TAU: f64 = 1e-6;

/// Imaginary-part snap for eigenvalues of self-adjoint problems, relative to
/// `max(1, |lambda|)`.
pub const REAL_SNAP_TAU: f64 = 1e-7;

/// Residual allowance for initial-value solutions and eigenfunction boundary
/// residuals, relative to the local solution magnitude.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Normalization accuracy for eigenfunctions of self-adjoint problems.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// `Gamma'(lambda)` below this fraction of the polynomial scale rejects a
/// point as a simple eigenvalue for the derivative formulas.
pub const SIMPLE_EIG_EPS: f64 = 1e-8;

/// Slack for the non-strict monotonicity audits, relative to
/// `max(1, |lambda|)`.
pub const AUDIT_SLACK: f64 = 1e-9;

/// Maximum step halvings the branch tracer performs before reporting an
/// ambiguous match.
pub const BRANCH_REFINE_CAP: u32 = 12;

/// Largest interior point count accepted by the symbolic pencil oracle.
pub const PENCIL_MAX_N: usize = 12;
