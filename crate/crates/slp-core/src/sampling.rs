//! Seeded random generators for equations, boundary conditions, and
//! tangents, used by the property and acceptance suites.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;
use std::f64::consts::PI;

use crate::bc::{BcTangent, BoundaryCondition, ChartId, CoupledParams, SeparatedParams};
use crate::deriv::EquationTangent;
use crate::equation::{EquationClass, SlEquation};
use crate::mat2::Mat2;

fn complex_in_box(rng: &mut StdRng, half_width: f64) -> Complex64 {
    Complex64::new(
        rng.gen_range(-half_width..half_width),
        rng.gen_range(-half_width..half_width),
    )
}

/// Nonzero complex entry with real and imaginary parts in `[-5, 5]`,
/// resampled until its magnitude clears a conditioning floor.
fn complex_coefficient(rng: &mut StdRng) -> Complex64 {
    loop {
        let z = complex_in_box(rng, 5.0);
        if z.norm() >= 0.3 {
            return z;
        }
    }
}

fn real_nonzero(rng: &mut StdRng) -> f64 {
    let mag = rng.gen_range(0.3..5.0);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

/// Random equation with complex coefficients, `N` interior points.
pub fn equation_complex(rng: &mut StdRng, n: usize) -> SlEquation {
    SlEquation::new(
        (0..=n).map(|_| complex_coefficient(rng)).collect(),
        (0..n).map(|_| complex_in_box(rng, 5.0)).collect(),
        (0..n).map(|_| complex_coefficient(rng)).collect(),
        EquationClass::Complex,
    )
}

/// Random equation in the real-positive-weight class.
pub fn equation_real_positive(rng: &mut StdRng, n: usize) -> SlEquation {
    SlEquation::from_real(
        &(0..=n).map(|_| real_nonzero(rng)).collect::<Vec<_>>(),
        &(0..n).map(|_| rng.gen_range(-5.0..5.0)).collect::<Vec<_>>(),
        &(0..n).map(|_| rng.gen_range(0.3..5.0)).collect::<Vec<_>>(),
        EquationClass::RealPositiveWeight,
    )
}

/// Random rank-2 complex boundary condition with a conditioning margin.
pub fn bc_complex(rng: &mut StdRng) -> BoundaryCondition {
    loop {
        let a = Mat2::new([
            [complex_in_box(rng, 2.0), complex_in_box(rng, 2.0)],
            [complex_in_box(rng, 2.0), complex_in_box(rng, 2.0)],
        ]);
        let b = Mat2::new([
            [complex_in_box(rng, 2.0), complex_in_box(rng, 2.0)],
            [complex_in_box(rng, 2.0), complex_in_box(rng, 2.0)],
        ]);
        let bc = BoundaryCondition { a, b };
        let scale2 = bc.scale_ref().powi(2);
        let best_minor = ChartId::GENERAL
            .into_iter()
            .map(|c| {
                let (c0, c1) = c.minor_columns();
                (Mat2::new([
                    [bc.entry(0, c0), bc.entry(0, c1)],
                    [bc.entry(1, c0), bc.entry(1, c1)],
                ]))
                .det()
                .norm()
            })
            .fold(0.0, f64::max);
        if best_minor >= 0.05 * scale2.max(1e-6) {
            return bc;
        }
    }
}

/// Random separated self-adjoint parameters, away from the interval
/// endpoints by a small margin.
pub fn separated_params(rng: &mut StdRng) -> SeparatedParams {
    SeparatedParams::new(rng.gen_range(0.0..PI - 1e-3), rng.gen_range(1e-3..PI)).unwrap()
}

/// Random `K ∈ SL(2, R)` with bounded entries.
pub fn sl2_real(rng: &mut StdRng) -> Mat2 {
    loop {
        let a = real_nonzero(rng).clamp(-3.0, 3.0);
        let b = rng.gen_range(-3.0..3.0);
        let c = rng.gen_range(-3.0..3.0);
        if a.abs() < 0.3 {
            continue;
        }
        let d = (1.0 + b * c) / a;
        if d.abs() <= 5.0 {
            return Mat2::from_real([[a, b], [c, d]]);
        }
    }
}

/// Random coupled self-adjoint parameters.
pub fn coupled_params(rng: &mut StdRng) -> CoupledParams {
    CoupledParams::new(rng.gen_range(0.0..PI - 1e-6), sl2_real(rng)).unwrap()
}

/// Random self-adjoint boundary condition: separated, coupled, or drawn
/// directly from a self-adjoint chart, in equal proportion.
pub fn bc_self_adjoint(rng: &mut StdRng) -> BoundaryCondition {
    match rng.gen_range(0..3) {
        0 => separated_params(rng).bc(),
        1 => coupled_params(rng).bc(),
        _ => {
            let chart = ChartId::SELF_ADJOINT[rng.gen_range(0..4)];
            let point = crate::bc::ChartPoint::SelfAdjoint {
                chart,
                a: rng.gen_range(-2.0..2.0),
                z: complex_in_box(rng, 2.0),
                b: rng.gen_range(-2.0..2.0),
            };
            point.reconstruct()
        }
    }
}

/// Random invertible 2x2 complex matrix with a determinant margin.
pub fn invertible_mat2(rng: &mut StdRng) -> Mat2 {
    loop {
        let t = Mat2::new([
            [complex_in_box(rng, 2.0), complex_in_box(rng, 2.0)],
            [complex_in_box(rng, 2.0), complex_in_box(rng, 2.0)],
        ]);
        if t.det().norm() >= 0.2 {
            return t;
        }
    }
}

/// Random tangent in the given chart: free complex slots for general
/// charts, the constrained pattern for self-adjoint charts.
pub fn bc_tangent(rng: &mut StdRng, chart: ChartId) -> BcTangent {
    if chart.is_self_adjoint_chart() {
        BcTangent::self_adjoint(
            chart,
            rng.gen_range(-1.0..1.0),
            complex_in_box(rng, 1.0),
            rng.gen_range(-1.0..1.0),
        )
        .unwrap()
    } else {
        BcTangent::general(
            chart,
            [
                complex_in_box(rng, 1.0),
                complex_in_box(rng, 1.0),
                complex_in_box(rng, 1.0),
                complex_in_box(rng, 1.0),
            ],
        )
        .unwrap()
    }
}

/// Random equation tangent with entries in `[-1, 1]`.
pub fn equation_tangent(rng: &mut StdRng, n: usize) -> EquationTangent {
    EquationTangent {
        h: (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        k: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        l: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    }
}
