//! Continuous eigenvalue branches over one-parameter problem families.
//!
//! Every simple eigenvalue continues to a branch; a double eigenvalue of a
//! self-adjoint problem continues to an ordered pair of real branches. The
//! tracer marches a parameter grid outward from the base problem, matching
//! eigenvalues by minimal distance gated by a locality count (the disc
//! around the previous value must contain exactly the tracked multiplicity)
//! and bisecting the step on ambiguity.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::bc::{chart_step, BcError, BcTangent, BoundaryCondition, SeparatedParams};
use crate::deriv::EquationTangent;
use crate::equation::SlEquation;
use crate::spectrum::{eigenvalues, is_self_adjoint_problem, SpectrumError, SpectrumReport};
use crate::tol::{AUDIT_SLACK, BRANCH_REFINE_CAP, EIGENVALUE_TAU, REAL_SNAP_TAU};
use crate::transfer::TransferSystem;

#[derive(Clone, Debug, thiserror::Error)]
pub enum BranchError {
    #[error("family is invalid at parameter {param}: {reason}")]
    InvalidGridPoint { param: f64, reason: String },
    #[error("eigenvalue match stayed ambiguous after {BRANCH_REFINE_CAP} halvings near parameter {param}")]
    MatchAmbiguity { param: f64, partial: Vec<Branch> },
    #[error("{lambda} is not an eigenvalue of the base problem")]
    StartNotEigenvalue { lambda: Complex64 },
    #[error(
        "starting eigenvalue has multiplicity {mult}; only simple and double starts are traced"
    )]
    HighMultiplicityStart { mult: u32 },
    #[error("parameter range [{lo}, {hi}] must contain 0 (the base problem)")]
    RangeExcludesBase { lo: f64, hi: f64 },
    #[error(transparent)]
    Bc(#[from] BcError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// The moving coordinate of a family: a boundary-condition chart tangent,
/// one of the canonical self-adjoint parameters, or an equation direction.
#[derive(Clone, Debug)]
pub enum FamilyTarget {
    /// Boundary condition moves along a chart tangent; equation fixed.
    BcChart(BcTangent),
    /// `α` of a separated self-adjoint condition, wrapped mod π.
    SeparatedAlpha,
    /// `β` of a separated self-adjoint condition, wrapped mod π.
    SeparatedBeta,
    /// `γ` of a coupled self-adjoint condition.
    CoupledGamma,
    /// Equation moves along `(h, k, l)` in `(1/f, q, w)`; condition fixed.
    Equation(EquationTangent),
}

/// A one-parameter family of problems through a base problem at `t = 0`,
/// sampled on `steps` uniform grid points over `range` (plus the base
/// point itself when the grid misses it).
#[derive(Clone, Debug)]
pub struct ProblemFamily {
    pub base_eq: SlEquation,
    pub base_bc: BoundaryCondition,
    pub target: FamilyTarget,
    pub range: (f64, f64),
    pub steps: usize,
}

impl ProblemFamily {
    /// The problem at parameter `t`. Grid points where the family leaves
    /// the space of valid problems are reported, never silently skipped.
    pub fn problem_at(&self, t: f64) -> Result<(SlEquation, BoundaryCondition), BranchError> {
        let invalid = |reason: String| BranchError::InvalidGridPoint { param: t, reason };
        match &self.target {
            FamilyTarget::BcChart(tangent) => {
                let point = if tangent.chart.is_self_adjoint_chart() {
                    self.base_bc.to_self_adjoint_chart(tangent.chart)
                } else {
                    self.base_bc.to_chart(tangent.chart)
                }
                .map_err(|e| invalid(e.to_string()))?;
                let moved = chart_step(&point, tangent, t).map_err(|e| invalid(e.to_string()))?;
                Ok((self.base_eq.clone(), moved.reconstruct()))
            }
            FamilyTarget::SeparatedAlpha | FamilyTarget::SeparatedBeta => {
                let params = self
                    .base_bc
                    .separated_params()
                    .map_err(|e| invalid(e.to_string()))?;
                let (alpha, beta) = match self.target {
                    FamilyTarget::SeparatedAlpha => {
                        (wrap_angle(params.alpha + t, false), params.beta)
                    }
                    _ => (params.alpha, wrap_angle(params.beta + t, true)),
                };
                let moved =
                    SeparatedParams::new(alpha, beta).map_err(|e| invalid(e.to_string()))?;
                Ok((self.base_eq.clone(), moved.bc()))
            }
            FamilyTarget::CoupledGamma => {
                let params = self
                    .base_bc
                    .coupled_params()
                    .map_err(|e| invalid(e.to_string()))?;
                let phase = Complex64::from_polar(1.0, params.gamma + t);
                let bc = BoundaryCondition {
                    a: params.k.scale(phase),
                    b: crate::mat2::Mat2::identity().scale(Complex64::new(-1.0, 0.0)),
                };
                Ok((self.base_eq.clone(), bc))
            }
            FamilyTarget::Equation(tangent) => {
                let n = self.base_eq.n();
                if !tangent.shape_matches(n) {
                    return Err(invalid("equation tangent shape mismatch".into()));
                }
                let mut eq = self.base_eq.clone();
                for i in 0..=n {
                    let inv =
                        Complex64::new(1.0, 0.0) / eq.f[i] + Complex64::new(tangent.h[i] * t, 0.0);
                    if inv.norm() < 1e-12 {
                        return Err(invalid(format!("1/f[{i}] crosses zero")));
                    }
                    eq.f[i] = Complex64::new(1.0, 0.0) / inv;
                }
                for i in 0..n {
                    eq.q[i] += Complex64::new(tangent.k[i] * t, 0.0);
                    eq.w[i] += Complex64::new(tangent.l[i] * t, 0.0);
                    if eq.w[i].norm() < 1e-12 {
                        return Err(invalid(format!("w[{}] crosses zero", i + 1)));
                    }
                }
                if !eq.validate().is_empty() {
                    return Err(invalid(format!("equation invalid: {:?}", eq.validate())));
                }
                Ok((eq, self.base_bc.clone()))
            }
        }
    }

    /// The sorted grid, the base parameter 0 inserted when missing.
    pub fn grid(&self) -> Result<Vec<f64>, BranchError> {
        let (lo, hi) = self.range;
        if !(lo <= 0.0 && 0.0 <= hi) {
            return Err(BranchError::RangeExcludesBase { lo, hi });
        }
        let steps = self.steps.max(2);
        let span = hi - lo;
        let mut grid: Vec<f64> = (0..steps)
            .map(|i| lo + span * i as f64 / (steps - 1) as f64)
            .collect();
        if !grid.iter().any(|t| t.abs() <= 1e-12 * span.max(1.0)) {
            grid.push(0.0);
        } else {
            // Snap the grid point nearest zero onto the base exactly.
            let idx = (0..grid.len())
                .min_by(|&a, &b| grid[a].abs().total_cmp(&grid[b].abs()))
                .unwrap();
            grid[idx] = 0.0;
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        Ok(grid)
    }

    /// Eigenvalue of the problem at `t` nearest to `near` (ungated); the
    /// finite-difference oracles are built from this.
    pub fn tracked_eigenvalue(&self, t: f64, near: Complex64) -> Result<Complex64, BranchError> {
        let (eq, bc) = self.problem_at(t)?;
        let ts = TransferSystem::build(&eq);
        let report = eigenvalues(&ts, &bc)?;
        report
            .nearest(near)
            .map(|e| e.value)
            .ok_or(BranchError::StartNotEigenvalue { lambda: near })
    }
}

fn wrap_angle(x: f64, half_closed: bool) -> f64 {
    let y = x.rem_euclid(PI);
    if half_closed {
        if y <= 1e-12 {
            PI
        } else {
            y
        }
    } else if y >= PI - 1e-12 {
        0.0
    } else {
        y
    }
}

/// One traced sample: parameter, eigenvalue, and its multiplicities there.
#[derive(Clone, Copy, Debug)]
pub struct BranchSample {
    pub param: f64,
    pub lambda: Complex64,
    pub analytic_mult: u32,
    pub geometric_mult: u32,
}

/// A continuous eigenvalue branch: samples ordered by parameter, plus the
/// per-step locality radius; consecutive eigenvalue jumps stay within it.
#[derive(Clone, Debug)]
pub struct Branch {
    pub samples: Vec<BranchSample>,
    pub step_radii: Vec<f64>,
}

impl Branch {
    pub fn max_step_jump_ratio(&self) -> f64 {
        self.samples
            .windows(2)
            .zip(&self.step_radii)
            .map(|(w, r)| (w[1].lambda - w[0].lambda).norm() / r)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone)]
struct TrackedPoint {
    param: f64,
    values: Vec<(Complex64, u32, u32)>, // (lambda, analytic, geometric), 1 or 2 entries
    radius_used: f64,
    report: SpectrumReport,
}

/// Traces the branch(es) through `lambda_start`, an eigenvalue of the base
/// problem: one branch from a simple start, the ordered pair `Λ1 ≤ Λ2`
/// from a double start of a self-adjoint problem.
pub fn branch_trace(
    family: &ProblemFamily,
    lambda_start: Complex64,
) -> Result<Vec<Branch>, BranchError> {
    let grid = family.grid()?;
    let (eq0, bc0) = family.problem_at(0.0)?;
    let ts0 = TransferSystem::build(&eq0);
    let report0 = eigenvalues(&ts0, &bc0)?;
    let start = report0
        .nearest(lambda_start)
        .copied()
        .ok_or(BranchError::StartNotEigenvalue {
            lambda: lambda_start,
        })?;
    let start_tol = EIGENVALUE_TAU.sqrt() * lambda_start.norm().max(1.0);
    if (start.value - lambda_start).norm() > start_tol {
        return Err(BranchError::StartNotEigenvalue {
            lambda: lambda_start,
        });
    }
    let self_adjoint = is_self_adjoint_problem(&ts0, &bc0);
    let pair_mode = match start.analytic_mult {
        1 => false,
        2 if self_adjoint => true,
        2 => false, // complex double point: minimal-distance continuation
        m => return Err(BranchError::HighMultiplicityStart { mult: m }),
    };

    let base_values = if pair_mode {
        vec![
            (start.value, start.analytic_mult, start.geometric_mult),
            (start.value, start.analytic_mult, start.geometric_mult),
        ]
    } else {
        vec![(start.value, start.analytic_mult, start.geometric_mult)]
    };
    let base = TrackedPoint {
        param: 0.0,
        values: base_values,
        radius_used: 0.0,
        report: report0,
    };

    let mut accepted: Vec<TrackedPoint> = vec![base.clone()];
    for side in [false, true] {
        let mut onward: Vec<f64> = grid
            .iter()
            .copied()
            .filter(|&t| if side { t > 0.0 } else { t < 0.0 })
            .collect();
        if !side {
            onward.reverse(); // march away from 0
        }
        let mut state = base.clone();
        for target in onward {
            state = advance(family, &state, target, 0, pair_mode, &mut accepted)?;
        }
    }
    accepted.sort_by(|a, b| a.param.total_cmp(&b.param));

    let branch_count = if pair_mode { 2 } else { 1 };
    let mut branches = Vec::with_capacity(branch_count);
    for b in 0..branch_count {
        let samples: Vec<BranchSample> = accepted
            .iter()
            .map(|p| BranchSample {
                param: p.param,
                lambda: p.values[b].0,
                analytic_mult: p.values[b].1,
                geometric_mult: p.values[b].2,
            })
            .collect();
        let mut step_radii = Vec::with_capacity(samples.len().saturating_sub(1));
        for i in 0..accepted.len().saturating_sub(1) {
            let r = if accepted[i].param < 0.0 {
                accepted[i].radius_used
            } else {
                accepted[i + 1].radius_used
            };
            step_radii.push(r);
        }
        branches.push(Branch {
            samples,
            step_radii,
        });
    }
    Ok(branches)
}

/// Locality radius: half the gap from the tracked values to the nearest
/// other eigenvalue, capped at half the eigenvalue magnitude scale.
fn locality_radius(state: &TrackedPoint) -> f64 {
    let hull: Vec<Complex64> = state.values.iter().map(|v| v.0).collect();
    let scale = hull.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let cap = 0.5 * scale;
    let mut gap = f64::INFINITY;
    for e in &state.report.eigenvalues {
        let d_hull = hull
            .iter()
            .map(|h| (e.value - h).norm())
            .fold(f64::INFINITY, f64::min);
        if d_hull > crate::spectrum::cluster_radius(e.value) {
            gap = gap.min(d_hull);
        }
    }
    (gap / 2.0).min(cap)
}

fn advance(
    family: &ProblemFamily,
    state: &TrackedPoint,
    target: f64,
    depth: u32,
    pair_mode: bool,
    accepted: &mut Vec<TrackedPoint>,
) -> Result<TrackedPoint, BranchError> {
    let radius = locality_radius(state);
    let (eq, bc) = family.problem_at(target)?;
    let ts = TransferSystem::build(&eq);
    let report = eigenvalues(&ts, &bc)?;

    let inside: Vec<&crate::spectrum::Eigenvalue> = report
        .eigenvalues
        .iter()
        .filter(|e| {
            state
                .values
                .iter()
                .any(|(v, _, _)| (e.value - v).norm() <= radius)
        })
        .collect();
    let count: u32 = inside.iter().map(|e| e.analytic_mult).sum();

    let matched = if pair_mode {
        // Expand by multiplicity, sort, and demand an ordered pair with
        // each branch moving by at most the locality radius.
        if count == 2 {
            let mut expanded: Vec<(Complex64, u32, u32)> = Vec::new();
            for e in &inside {
                for _ in 0..e.analytic_mult {
                    expanded.push((e.value, e.analytic_mult, e.geometric_mult));
                }
            }
            expanded.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
            let close = expanded
                .iter()
                .zip(&state.values)
                .all(|(new, old)| (new.0 - old.0).norm() <= radius);
            close.then_some(expanded)
        } else {
            None
        }
    } else {
        // Minimal-distance match with a clear-winner margin: the nearest
        // cluster must lie in the locality disc and at most half as far as
        // the runner-up. A winning cluster of higher multiplicity is the
        // branch passing through a collision.
        let mut by_distance: Vec<(f64, &crate::spectrum::Eigenvalue)> = report
            .eigenvalues
            .iter()
            .map(|e| ((e.value - state.values[0].0).norm(), e))
            .collect();
        by_distance.sort_by(|a, b| a.0.total_cmp(&b.0));
        match by_distance.as_slice() {
            [(d1, e), rest @ ..] if *d1 <= radius => {
                let clear = rest.first().map_or(true, |(d2, _)| *d1 <= 0.5 * d2);
                clear.then(|| vec![(e.value, e.analytic_mult, e.geometric_mult)])
            }
            _ => None,
        }
    };

    match matched {
        Some(values) => {
            let point = TrackedPoint {
                param: target,
                values,
                radius_used: radius,
                report,
            };
            accepted.push(point.clone());
            Ok(point)
        }
        None if depth >= BRANCH_REFINE_CAP => {
            // Steps cannot shrink further: continue by minimal distance
            // (the convention at collision points), provided the jump stays
            // within a small multiple of the locality radius. An escaping
            // branch, or an empty spectrum, stays ambiguous.
            let centroid =
                state.values.iter().map(|v| v.0).sum::<Complex64>() / state.values.len() as f64;
            let nearest = report.nearest(centroid).copied();
            let jump = nearest.map(|e| {
                state
                    .values
                    .iter()
                    .map(|v| (e.value - v.0).norm())
                    .fold(0.0, f64::max)
            });
            match (nearest, jump) {
                (Some(e), Some(jump)) if jump <= 3.0 * radius => {
                    let one = (e.value, e.analytic_mult, e.geometric_mult);
                    let point = TrackedPoint {
                        param: target,
                        values: if pair_mode { vec![one, one] } else { vec![one] },
                        radius_used: radius.max(jump),
                        report,
                    };
                    accepted.push(point.clone());
                    Ok(point)
                }
                _ => Err(BranchError::MatchAmbiguity {
                    param: target,
                    partial: partial_branches(accepted, pair_mode),
                }),
            }
        }
        None => {
            // Refinement-inserted points are kept in the traced output.
            let mid = 0.5 * (state.param + target);
            let half = advance(family, state, mid, depth + 1, pair_mode, accepted)?;
            advance(family, &half, target, depth + 1, pair_mode, accepted)
        }
    }
}

fn partial_branches(accepted: &[TrackedPoint], pair_mode: bool) -> Vec<Branch> {
    let mut sorted = accepted.to_vec();
    sorted.sort_by(|a, b| a.param.total_cmp(&b.param));
    let count = if pair_mode { 2 } else { 1 };
    (0..count)
        .map(|b| Branch {
            samples: sorted
                .iter()
                .map(|p| BranchSample {
                    param: p.param,
                    lambda: p.values[b].0,
                    analytic_mult: p.values[b].1,
                    geometric_mult: p.values[b].2,
                })
                .collect(),
            step_radii: vec![],
        })
        .collect()
}

/// Expected trend of a real branch under audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonotonicityExpectation {
    StrictDecreasing,
    StrictIncreasing,
    NonDecreasing,
    NonIncreasing,
    /// Positive samples nonincreasing, negative samples nondecreasing (the
    /// weight-direction law).
    SignSplitByZero,
}

/// One offending consecutive pair in a monotonicity audit.
#[derive(Clone, Copy, Debug)]
pub struct AuditViolation {
    pub index: usize,
    pub param: f64,
    pub diff: f64,
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub passed: bool,
    pub violations: Vec<AuditViolation>,
}

/// Checks consecutive sample differences of a real branch against the
/// expectation, with slack for the non-strict modes.
pub fn monotonicity_audit(branch: &Branch, expectation: MonotonicityExpectation) -> AuditReport {
    let mut violations = Vec::new();
    for (i, w) in branch.samples.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let scale = a.lambda.norm().max(b.lambda.norm()).max(1.0);
        if a.lambda.im.abs() > REAL_SNAP_TAU * scale || b.lambda.im.abs() > REAL_SNAP_TAU * scale {
            violations.push(AuditViolation {
                index: i,
                param: b.param,
                diff: f64::NAN,
            });
            continue;
        }
        let d = b.lambda.re - a.lambda.re;
        let slack = AUDIT_SLACK * scale;
        let bad = match expectation {
            MonotonicityExpectation::StrictDecreasing => d >= -slack,
            MonotonicityExpectation::StrictIncreasing => d <= slack,
            MonotonicityExpectation::NonDecreasing => d < -slack,
            MonotonicityExpectation::NonIncreasing => d > slack,
            MonotonicityExpectation::SignSplitByZero => {
                if a.lambda.re > slack && b.lambda.re > slack {
                    d > slack
                } else if a.lambda.re < -slack && b.lambda.re < -slack {
                    d < -slack
                } else {
                    false
                }
            }
        };
        if bad {
            violations.push(AuditViolation {
                index: i,
                param: b.param,
                diff: d,
            });
        }
    }
    AuditReport {
        passed: violations.is_empty(),
        violations,
    }
}
