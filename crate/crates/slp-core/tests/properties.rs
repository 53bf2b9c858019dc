//! Randomized structural laws: transfer identities, boundary-condition
//! geometry, and the multiplicity/count/reality laws of the spectrum,
//! plus the algebraic polynomial and rank invariants as property tests.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use slp_core::sampling;
use slp_core::spectrum::{self, SpectrumKind};
use slp_core::{
    characteristic_polynomial, eigenvalues, leading_terms, leading_terms_closed_form,
    normalized_coefficient_distance, pencil_oracle, self_adjoint_count, solve_ivp, BcClass,
    ChartPoint, FundamentalPair, Mat2, Polynomial, TransferSystem,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------- transfer

#[test]
fn transfer_determinant_and_leading_terms_random() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    for _ in 0..200 {
        let n = rng.gen_range(2..=12);
        let eq = sampling::equation_complex(&mut rng, n);
        let ts = TransferSystem::build(&eq);
        for k in 0..=n {
            let det = ts.phi(k).det_poly();
            let scale = ts.phi(k).max_coeff_magnitude().max(1.0);
            assert!(
                (det.coeff(0) - c(1.0, 0.0)).norm() <= 1e-9 * scale,
                "det constant term off at k = {k}"
            );
            for j in 1..det.coeffs.len() {
                assert!(
                    det.coeff(j).norm() <= 1e-9 * scale,
                    "det coefficient {j} = {} at k = {k}",
                    det.coeff(j)
                );
            }
        }
        let lead = leading_terms(&ts);
        let closed = leading_terms_closed_form(&eq);
        for i in 0..4 {
            assert!(
                (lead[i] - closed[i]).norm() <= 1e-9 * closed[i].norm().max(1e-30),
                "leading term {i}: {} vs {}",
                lead[i],
                closed[i]
            );
        }
    }
}

#[test]
fn every_solution_is_a_fundamental_combination() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    for _ in 0..50 {
        let n = rng.gen_range(2..=10);
        let eq = sampling::equation_complex(&mut rng, n);
        let lambda = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let c1 = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let c2 = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let direct = solve_ivp(&eq, lambda, 0, c1, c2);
        let pair = FundamentalPair::at(&eq, lambda);
        let combo = pair.combine(c1, c2);
        let scale = direct.max_abs().max(1.0);
        for k in 0..direct.y.len() {
            assert!((direct.y[k] - combo.y[k]).norm() <= 1e-10 * scale);
        }
        for k in 0..direct.qd.len() {
            assert!((direct.qd[k] - combo.qd[k]).norm() <= 1e-10 * scale);
        }
    }
}

// --------------------------------------------------------------- bc space

#[test]
fn bc_observables_are_equivalence_invariant() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    for i in 0..100 {
        let bc = if i % 2 == 0 {
            sampling::bc_complex(&mut rng)
        } else {
            sampling::bc_self_adjoint(&mut rng)
        };
        let t = sampling::invertible_mat2(&mut rng);
        let moved = bc.transformed(&t);
        assert_eq!(bc.is_self_adjoint(), moved.is_self_adjoint());
        assert_eq!(bc.classify().unwrap(), moved.classify().unwrap());
        let p1 = bc.normalize_to_chart().unwrap();
        let p2 = moved.normalize_to_chart().unwrap();
        assert!(
            p1.distance(&p2) < 1e-10 * (1.0 + max_coord(&p1)),
            "chart points differ under equivalence"
        );
    }
}

fn max_coord(p: &ChartPoint) -> f64 {
    match p {
        ChartPoint::General { coords, .. } => coords.iter().map(|z| z.norm()).fold(0.0, f64::max),
        ChartPoint::SelfAdjoint { a, z, b, .. } => a.abs().max(z.norm()).max(b.abs()),
    }
}

#[test]
fn self_adjoint_bcs_land_in_a_self_adjoint_chart() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    for _ in 0..200 {
        let bc = sampling::bc_self_adjoint(&mut rng);
        let point = bc
            .self_adjoint_chart()
            .expect("no self-adjoint chart found");
        assert!(point.chart().is_self_adjoint_chart());
        // The reconstruction is equivalent to the input.
        let back = point.reconstruct();
        assert!(back.is_self_adjoint());
        assert_eq!(back.classify().unwrap(), bc.classify().unwrap());
    }
}

#[test]
fn canonical_forms_classify_and_certify() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    for _ in 0..100 {
        let sep = sampling::separated_params(&mut rng);
        let bc = sep.bc();
        assert_eq!(bc.classify().unwrap(), BcClass::Separated);
        assert!(bc.is_self_adjoint());

        let coupled = sampling::coupled_params(&mut rng);
        let bc = coupled.bc();
        assert_eq!(bc.classify().unwrap(), BcClass::Coupled);
        assert!(bc.is_self_adjoint());
    }
}

#[test]
fn chart_round_trip_is_identity() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    for _ in 0..100 {
        let bc = sampling::bc_complex(&mut rng);
        let p = bc.normalize_to_chart().unwrap();
        let q = p.reconstruct().normalize_to_chart().unwrap();
        assert!(p.distance(&q) < 1e-10 * (1.0 + max_coord(&p)));
    }
}

// --------------------------------------------------------------- spectrum

#[test]
fn analytic_multiplicity_dominates_geometric() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    for _ in 0..300 {
        let n = rng.gen_range(2..=8);
        let eq = sampling::equation_complex(&mut rng, n);
        let bc = sampling::bc_complex(&mut rng);
        let ts = TransferSystem::build(&eq);
        let report = eigenvalues(&ts, &bc).unwrap();
        if report.kind != SpectrumKind::Finite {
            continue;
        }
        for e in &report.eigenvalues {
            assert!(
                e.analytic_mult >= e.geometric_mult,
                "analytic {} < geometric {} at {}",
                e.analytic_mult,
                e.geometric_mult,
                e.value
            );
        }
    }
}

#[test]
fn self_adjoint_problems_have_real_spectrum_with_equal_multiplicities() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    for _ in 0..300 {
        let n = rng.gen_range(2..=8);
        let eq = sampling::equation_real_positive(&mut rng, n);
        let bc = sampling::bc_self_adjoint(&mut rng);
        let ts = TransferSystem::build(&eq);
        let report = eigenvalues(&ts, &bc).unwrap();
        assert_eq!(report.kind, SpectrumKind::Finite);
        for e in &report.eigenvalues {
            assert!(
                e.value.im.abs() <= 1e-7 * e.value.norm().max(1.0),
                "non-real eigenvalue {} of a self-adjoint problem",
                e.value
            );
            assert_eq!(
                e.analytic_mult, e.geometric_mult,
                "multiplicity mismatch at {}",
                e.value
            );
        }
        // Count law: total analytic multiplicity is N - 2 + r.
        let count = self_adjoint_count(&ts, &bc).unwrap();
        assert_eq!(
            report.total_multiplicity(),
            count.expected_total,
            "count law failed: N = {n}, r = {}",
            count.r
        );
        assert_eq!(
            count.r == 2,
            count.kappa.norm() > 1e-8 * bc.scale_ref().powi(2)
        );
    }
}

#[test]
fn separated_self_adjoint_spectra_are_simple() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0009);
    for _ in 0..100 {
        let n = rng.gen_range(2..=8);
        let eq = sampling::equation_real_positive(&mut rng, n);
        let bc = sampling::separated_params(&mut rng).bc();
        let ts = TransferSystem::build(&eq);
        let report = eigenvalues(&ts, &bc).unwrap();
        for e in &report.eigenvalues {
            assert_eq!((e.analytic_mult, e.geometric_mult), (1, 1));
        }
    }
}

#[test]
fn pencil_oracle_agrees_with_transfer_route() {
    let mut rng = StdRng::seed_from_u64(0x5eed_000a);
    for i in 0..100 {
        let n = rng.gen_range(2..=8);
        let (eq, bc) = if i % 2 == 0 {
            (
                sampling::equation_complex(&mut rng, n),
                sampling::bc_complex(&mut rng),
            )
        } else {
            (
                sampling::equation_real_positive(&mut rng, n),
                sampling::bc_self_adjoint(&mut rng),
            )
        };
        let ts = TransferSystem::build(&eq);
        let direct = eigenvalues(&ts, &bc).unwrap();
        let oracle = pencil_oracle(&eq, &bc).unwrap();
        assert_eq!(direct.kind, oracle.kind);
        let coeff_dist =
            normalized_coefficient_distance(&direct.char_poly.gamma, &oracle.char_poly.gamma);
        assert!(
            coeff_dist <= 1e-7,
            "normalized coefficient distance {coeff_dist:e} (iteration {i}, N = {n})"
        );
        let eig_dist = spectrum::spectrum_multiset_distance(&direct, &oracle);
        assert!(
            eig_dist <= 1e-7 * (1.0 + spectral_radius(&direct)),
            "eigenvalue multiset distance {eig_dist:e}"
        );
    }
}

fn spectral_radius(r: &spectrum::SpectrumReport) -> f64 {
    r.eigenvalues
        .iter()
        .map(|e| e.value.norm())
        .fold(0.0, f64::max)
}

#[test]
fn spectrum_is_representative_invariant() {
    let mut rng = StdRng::seed_from_u64(0x5eed_000b);
    for _ in 0..50 {
        let n = rng.gen_range(2..=8);
        let eq = sampling::equation_complex(&mut rng, n);
        let bc = sampling::bc_complex(&mut rng);
        let t = sampling::invertible_mat2(&mut rng);
        let ts = TransferSystem::build(&eq);
        let r1 = eigenvalues(&ts, &bc).unwrap();
        let r2 = eigenvalues(&ts, &bc.transformed(&t)).unwrap();
        let dist = spectrum::spectrum_multiset_distance(&r1, &r2);
        assert!(dist <= 1e-7 * (1.0 + spectral_radius(&r1)));
        for (a, b) in r1.eigenvalues.iter().zip(&r2.eigenvalues) {
            assert_eq!(a.analytic_mult, b.analytic_mult);
            assert_eq!(a.geometric_mult, b.geometric_mult);
        }
    }
}

#[test]
fn double_eigenvalue_bc_is_unique() {
    // The constructed condition has kernel dimension 2 at lambda; any other
    // random condition has kernel dimension at most 1 there.
    let mut rng = StdRng::seed_from_u64(0x5eed_000c);
    for _ in 0..10 {
        let n = rng.gen_range(2..=8);
        let eq = sampling::equation_complex(&mut rng, n);
        let ts = TransferSystem::build(&eq);
        let lambda = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let special = slp_core::double_eigenvalue_bc(&ts, lambda);
        assert_eq!(
            slp_core::geometric_multiplicity(&ts, &special, lambda).unwrap(),
            2
        );
        for _ in 0..50 {
            let other = sampling::bc_complex(&mut rng);
            let dim = spectrum::kernel_dimension(&ts, &other, lambda);
            assert!(dim <= 1, "random condition with kernel dimension {dim}");
        }
    }
}

#[test]
fn constructed_double_condition_has_double_analytic_multiplicity() {
    // On a real-positive equation at real lambda, the constructed condition
    // is self-adjoint and the eigenvalue there is analytically double.
    let mut rng = StdRng::seed_from_u64(0x5eed_000e);
    for _ in 0..20 {
        let eq = sampling::equation_real_positive(&mut rng, 4);
        let ts = TransferSystem::build(&eq);
        let lambda = c(1.0, 0.0);
        let bc = slp_core::double_eigenvalue_bc(&ts, lambda);
        assert!(bc.is_self_adjoint());
        let report = eigenvalues(&ts, &bc).unwrap();
        let at_one = report.nearest(lambda).unwrap();
        assert!((at_one.value - lambda).norm() < 1e-7);
        assert!(
            at_one.analytic_mult >= 2,
            "analytic multiplicity {}",
            at_one.analytic_mult
        );
    }
}

#[test]
fn characteristic_polynomial_formulas_agree_on_random_problems() {
    let mut rng = StdRng::seed_from_u64(0x5eed_000d);
    for _ in 0..100 {
        let n = rng.gen_range(2..=10);
        let eq = sampling::equation_complex(&mut rng, n);
        let bc = sampling::bc_complex(&mut rng);
        let ts = TransferSystem::build(&eq);
        let cp = characteristic_polynomial(&ts, &bc).unwrap();
        let diff = cp.gamma.sub(&cp.via_cofactor_sum).max_coeff_magnitude();
        assert!(diff <= 1e-9 * cp.gamma.max_coeff_magnitude().max(1e-3 * cp.scale));
    }
}

// ------------------------------------------------------------- proptests

fn arb_poly(max_deg: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..=max_deg + 1)
        .prop_map(|v| Polynomial::new(v.into_iter().map(|(re, im)| c(re, im)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_product_evaluates_pointwise(
        p in arb_poly(12),
        q in arb_poly(12),
        seed in any::<u64>(),
    ) {
        let product = p.mul(&q);
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..20 {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = rng.gen_range(0.0..2.0);
            let lambda = Complex64::from_polar(r, theta);
            let lhs = product.eval(lambda);
            let rhs = p.eval(lambda) * q.eval(lambda);
            let scale = p.eval_scale(lambda) * q.eval_scale(lambda).max(1e-30);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale.max(1e-30));
        }
    }

    #[test]
    fn numeric_degree_is_scale_invariant(
        p in arb_poly(10),
        scale_re in -4.0..4.0f64,
        scale_im in -4.0..4.0f64,
    ) {
        let s = c(scale_re, scale_im);
        prop_assume!(s.norm() > 1e-3);
        prop_assert_eq!(p.numeric_degree(), p.scale(s).numeric_degree());
    }

    #[test]
    fn mat2_rank_is_scale_invariant(
        entries in prop::array::uniform8(-3.0..3.0f64),
        scale_mag in 0.01..100.0f64,
    ) {
        let m = Mat2::new([
            [c(entries[0], entries[1]), c(entries[2], entries[3])],
            [c(entries[4], entries[5]), c(entries[6], entries[7])],
        ]);
        let reference = m.max_abs().max(1e-9);
        let s = c(scale_mag, 0.0);
        prop_assert_eq!(
            slp_core::mat2_rank(&m, reference),
            slp_core::mat2_rank(&m.scale(s), reference * scale_mag)
        );
    }
}
