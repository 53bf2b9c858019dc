//! Regenerates the branch data behind the six example figures through the
//! full library pipeline, together with the closed-form reference values
//! each figure must reproduce.

use serde_json::json;
use slp_core::Complex64;
use std::f64::consts::PI;

use slp_core::branch::{branch_trace, Branch, BranchError, FamilyTarget, ProblemFamily};
use slp_core::deriv::EquationTangent;
use slp_core::{BcTangent, BoundaryCondition, ChartId, EquationClass, SeparatedParams, SlEquation};

use crate::output::{fmt17, BranchRow, BRANCH_CSV_HEADER};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fourier() -> SlEquation {
    SlEquation::from_real(
        &[1.0, 1.0, 1.0],
        &[0.0, 0.0],
        &[1.0, 1.0],
        EquationClass::RealPositiveWeight,
    )
}

fn stepped(f0: f64, q1: f64, w1: f64) -> SlEquation {
    SlEquation::from_real(
        &[f0, 1.0, 1.0],
        &[q1, 0.0],
        &[w1, 1.0],
        EquationClass::RealPositiveWeight,
    )
}

/// The shared coupled self-adjoint condition [[1,-1,0,1],[0,1,-1,0]] of the
/// equation-family examples.
fn coupled_bc() -> BoundaryCondition {
    BoundaryCondition::from_real_rows([[1.0, -1.0, 0.0, 1.0], [0.0, 1.0, -1.0, 0.0]]).unwrap()
}

/// One figure row plus its closed-form reference value.
#[derive(Clone, Copy, Debug)]
pub struct FigureRow {
    pub row: BranchRow,
    pub reference: f64,
}

pub struct Figure {
    pub name: &'static str,
    /// What the CSV `param` column holds.
    pub param_name: &'static str,
    pub rows: Vec<FigureRow>,
    /// The traced branches, for the monotonicity audits.
    pub branches: Vec<Branch>,
}

impl Figure {
    pub fn max_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| ((r.row.lambda - c(r.reference, 0.0)).norm()).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from(BRANCH_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt17(r.row.param),
                r.row.branch_id,
                fmt17(r.row.lambda.re),
                fmt17(r.row.lambda.im),
                r.row.analytic_mult,
                r.row.geometric_mult
            ));
        }
        out
    }

    /// Sidecar with the closed-form reference value for every CSV row.
    pub fn reference_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&json!({
            "figure": self.name,
            "param": self.param_name,
            "rows": self.rows.iter().map(|r| json!({
                "param": r.row.param,
                "branch_id": r.row.branch_id,
                "lambda": [r.reference, 0.0],
            })).collect::<Vec<_>>(),
        }))
        .unwrap();
        s.push('\n');
        s
    }
}

/// Flattens traced branches into figure rows, mapping the family parameter
/// to the absolute coordinate and attaching the reference values.
fn assemble(
    name: &'static str,
    param_name: &'static str,
    traces: Vec<(Branch, Box<dyn Fn(f64) -> f64>)>,
    to_abs: impl Fn(f64) -> f64,
) -> Figure {
    let mut rows = Vec::new();
    let mut branches = Vec::new();
    for (id, (branch, reference)) in traces.into_iter().enumerate() {
        for s in &branch.samples {
            let abs = to_abs(s.param);
            rows.push(FigureRow {
                row: BranchRow {
                    param: abs,
                    branch_id: id as u32,
                    lambda: s.lambda,
                    analytic_mult: s.analytic_mult,
                    geometric_mult: s.geometric_mult,
                },
                reference: reference(abs),
            });
        }
        branches.push(branch);
    }
    rows.sort_by(|a, b| {
        a.row
            .param
            .total_cmp(&b.row.param)
            .then(a.row.branch_id.cmp(&b.row.branch_id))
    });
    Figure {
        name,
        param_name,
        rows,
        branches,
    }
}

fn single(branches: Vec<Branch>) -> Branch {
    debug_assert_eq!(branches.len(), 1);
    branches.into_iter().next().unwrap()
}

/// The single branch of `S_{α, π}` on the modified Fourier equation:
/// `λ(α) = (2 cos α + sin α) / (cos α + sin α)`.
pub fn fig5_1() -> Result<Figure, BranchError> {
    let family = ProblemFamily {
        base_eq: fourier(),
        base_bc: SeparatedParams::new(0.0, PI).unwrap().bc(),
        target: FamilyTarget::SeparatedAlpha,
        range: (0.0, 3.0 * PI / 4.0 - 0.01),
        steps: 100,
    };
    let branch = single(branch_trace(&family, c(2.0, 0.0))?);
    Ok(assemble(
        "fig5_1",
        "alpha",
        vec![(
            branch,
            Box::new(|a: f64| (2.0 * a.cos() + a.sin()) / (a.cos() + a.sin())),
        )],
        |t| t,
    ))
}

/// The two roots of the `S_{α, π/2}` characteristic polynomial, ordered.
fn alpha_pi_half_roots(alpha: f64) -> (f64, f64) {
    let (s, co) = alpha.sin_cos();
    let disc = (co * co + 4.0 * (2.0 * alpha).sin() + 4.0).sqrt();
    let denom = 2.0 * (co + s);
    let plus = (3.0 * co + 2.0 * s + disc) / denom;
    let minus = (3.0 * co + 2.0 * s - disc) / denom;
    (plus.min(minus), plus.max(minus))
}

/// The three branch pieces of `S_{α, π/2}`: the lower branch on
/// `[0, 3π/4)`, the index-changing branch through the lone eigenvalue at
/// `α = 3π/4`, and the upper branch on `(3π/4, π)`.
pub fn fig5_2() -> Result<Figure, BranchError> {
    let eq = fourier();
    let base = |alpha: f64| SeparatedParams::new(alpha, PI / 2.0).unwrap().bc();
    let family = |alpha0: f64, lo: f64, hi: f64| ProblemFamily {
        base_eq: eq.clone(),
        base_bc: base(alpha0),
        target: FamilyTarget::SeparatedAlpha,
        range: (lo - alpha0, hi - alpha0),
        steps: 100,
    };

    let start_low = alpha_pi_half_roots(0.0).0;
    let lower = single(branch_trace(
        &family(0.0, 0.0, 3.0 * PI / 4.0 - 0.03),
        c(start_low, 0.0),
    )?);

    let through = single(branch_trace(
        &family(3.0 * PI / 4.0, 0.0, PI - 0.01),
        c(1.0, 0.0),
    )?);

    let alpha2 = 7.0 * PI / 8.0;
    let start_high = alpha_pi_half_roots(alpha2).1;
    let upper = single(branch_trace(
        &family(alpha2, 3.0 * PI / 4.0 + 0.03, PI - 0.01),
        c(start_high, 0.0),
    )?);

    let lower_ref = |a: f64| alpha_pi_half_roots(a).0;
    let upper_ref = |a: f64| alpha_pi_half_roots(a).1;
    let through_ref = move |a: f64| {
        if (a.cos() + a.sin()).abs() < 1e-9 {
            1.0
        } else if a < 3.0 * PI / 4.0 {
            alpha_pi_half_roots(a).1
        } else {
            alpha_pi_half_roots(a).0
        }
    };

    // Parameters are offsets from three different base angles; map each
    // trace to the absolute angle separately before assembling.
    let mut traces: Vec<(Branch, Box<dyn Fn(f64) -> f64>)> = Vec::new();
    let shift = |branch: Branch, alpha0: f64| -> Branch {
        let mut b = branch;
        for s in &mut b.samples {
            s.param += alpha0;
        }
        b
    };
    traces.push((shift(lower, 0.0), Box::new(lower_ref)));
    traces.push((shift(through, 3.0 * PI / 4.0), Box::new(through_ref)));
    traces.push((shift(upper, alpha2), Box::new(upper_ref)));
    Ok(assemble("fig5_2", "alpha", traces, |t| t))
}

/// The ordered pair through the double eigenvalue 0 of
/// `[[1, a12, -1, 0], [0, -1, b21, 1]]` at `(a12, b21) = (2, 0)`, swept in
/// `a12`: `{min, max}` of 0 and `2(a12-2)/(a12-1)`, with the kink at
/// `a12 = 2`.
pub fn fig5_3() -> Result<Figure, BranchError> {
    let base =
        BoundaryCondition::from_real_rows([[1.0, 2.0, -1.0, 0.0], [0.0, -1.0, 0.0, 1.0]]).unwrap();
    let family = ProblemFamily {
        base_eq: fourier(),
        base_bc: base,
        target: FamilyTarget::BcChart(
            BcTangent::self_adjoint(ChartId::O14, 1.0, c(0.0, 0.0), 0.0).unwrap(),
        ),
        range: (-0.9, 2.0),
        steps: 100,
    };
    let branches = branch_trace(&family, c(0.0, 0.0))?;
    let g = |a: f64| 2.0 * (a - 2.0) / (a - 1.0);
    let traces: Vec<(Branch, Box<dyn Fn(f64) -> f64>)> = branches
        .into_iter()
        .zip([
            Box::new(move |a: f64| g(a).min(0.0)) as Box<dyn Fn(f64) -> f64>,
            Box::new(move |a: f64| g(a).max(0.0)),
        ])
        .collect();
    Ok(assemble("fig5_3", "a12", traces, |t| 2.0 + t))
}

/// The ordered pair of the `f_0`-family through the double eigenvalue at
/// `1/f_0 = -1`: in the coordinate `u = 1/f_0` the branches are
/// `{min, max}` of 1 and `-u`, with the kink at `u = -1`.
pub fn fig5_4() -> Result<Figure, BranchError> {
    let family = ProblemFamily {
        base_eq: stepped(-1.0, 0.0, 1.0),
        base_bc: coupled_bc(),
        target: FamilyTarget::Equation(EquationTangent::unit_inv_f(2, 0)),
        range: (-2.0, 0.9),
        steps: 100,
    };
    let branches = branch_trace(&family, c(1.0, 0.0))?;
    let traces: Vec<(Branch, Box<dyn Fn(f64) -> f64>)> = branches
        .into_iter()
        .zip([
            Box::new(|u: f64| (-u).min(1.0)) as Box<dyn Fn(f64) -> f64>,
            Box::new(|u: f64| (-u).max(1.0)),
        ])
        .collect();
    Ok(assemble("fig5_4", "inv_f0", traces, |t| -1.0 + t))
}

/// The ordered pair of the `q_1`-family through the double eigenvalue at
/// `q_1 = 0`: `{min, max}` of 1 and `1 + q_1`, with the kink at `q_1 = 0`.
pub fn fig5_5() -> Result<Figure, BranchError> {
    let family = ProblemFamily {
        base_eq: stepped(-1.0, 0.0, 1.0),
        base_bc: coupled_bc(),
        target: FamilyTarget::Equation(EquationTangent::unit_q(2, 1)),
        range: (-2.0, 2.0),
        steps: 101,
    };
    let branches = branch_trace(&family, c(1.0, 0.0))?;
    let traces: Vec<(Branch, Box<dyn Fn(f64) -> f64>)> = branches
        .into_iter()
        .zip([
            Box::new(|s: f64| (1.0 + s).min(1.0)) as Box<dyn Fn(f64) -> f64>,
            Box::new(|s: f64| (1.0 + s).max(1.0)),
        ])
        .collect();
    Ok(assemble("fig5_5", "q1", traces, |t| t))
}

/// The ordered pair of the `w_1`-family through the double eigenvalue at
/// `w_1 = 1`: `{min, max}` of 1 and `1/w_1`, with the kink at `w_1 = 1`.
pub fn fig5_6() -> Result<Figure, BranchError> {
    let family = ProblemFamily {
        base_eq: stepped(-1.0, 0.0, 1.0),
        base_bc: coupled_bc(),
        target: FamilyTarget::Equation(EquationTangent::unit_w(2, 1)),
        range: (-0.96, 3.0),
        steps: 100,
    };
    let branches = branch_trace(&family, c(1.0, 0.0))?;
    let traces: Vec<(Branch, Box<dyn Fn(f64) -> f64>)> = branches
        .into_iter()
        .zip([
            Box::new(|s: f64| (1.0 / s).min(1.0)) as Box<dyn Fn(f64) -> f64>,
            Box::new(|s: f64| (1.0 / s).max(1.0)),
        ])
        .collect();
    Ok(assemble("fig5_6", "w1", traces, |t| 1.0 + t))
}

pub fn all_figures() -> Result<Vec<Figure>, BranchError> {
    Ok(vec![
        fig5_1()?,
        fig5_2()?,
        fig5_3()?,
        fig5_4()?,
        fig5_5()?,
        fig5_6()?,
    ])
}
