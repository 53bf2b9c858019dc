//! Spectral analysis of discrete Sturm-Liouville problems.
//!
//! A problem couples the second-order difference equation
//! `-∇(f_n Δy_n) + q_n y_n = λ w_n y_n` on `n ∈ [1, N]` with a rank-2
//! boundary condition `A (y_0, f_0Δy_0)^T + B (y_N, f_NΔy_N)^T = 0`.
//! This crate computes the complete spectrum with analytic and geometric
//! multiplicities, classifies and parameterizes boundary conditions,
//! traces continuous eigenvalue branches over problem families, and
//! evaluates the closed-form eigenvalue derivatives with their
//! monotonicity laws.
//!
//! All arithmetic is complex double precision ([`num_complex::Complex64`]);
//! thresholds live in [`tol`].

pub mod bc;
pub mod branch;
pub mod deriv;
pub mod equation;
pub mod mat2;
pub mod pencil;
pub mod poly;
pub mod roots;
pub mod sampling;
pub mod spectrum;
pub mod tol;
pub mod transfer;

pub use num_complex::Complex64;

pub use bc::{
    canonical_bc, double_eigenvalue_bc, BcClass, BcError, BcTangent, BoundaryCondition,
    CanonicalParams, ChartId, ChartPoint, CoupledParams, SeparatedParams,
};
pub use branch::{
    branch_trace, monotonicity_audit, AuditReport, Branch, BranchError, BranchSample, FamilyTarget,
    MonotonicityExpectation, ProblemFamily,
};
pub use deriv::{
    bc_derivative, bc_derivative_kernel, central_difference, equation_derivative, lagrange_form,
    self_adjoint_bc_derivative, separated_derivatives, BcDerivativeKernel, DerivError,
    EquationTangent,
};
pub use equation::{EquationClass, EquationViolation, SlEquation, SolutionSequence};
pub use mat2::{mat2_rank, rank_2x4, Mat2};
pub use pencil::{normalized_coefficient_distance, pencil_oracle};
pub use poly::Polynomial;
pub use spectrum::{
    characteristic_polynomial, count_in_region, eigenfunction, eigenspace_basis, eigenvalues,
    geometric_multiplicity, is_self_adjoint_problem, self_adjoint_count, CharacteristicPolynomial,
    EigenfunctionData, Eigenvalue, SelfAdjointCount, SpectrumError, SpectrumKind, SpectrumReport,
};
pub use transfer::{
    leading_terms, leading_terms_closed_form, solve_ivp, FundamentalPair, PolyMat2, TransferSystem,
};
