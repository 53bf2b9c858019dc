//! Independent spectral oracle through the linear matrix pencil.
//!
//! The problem in the unknowns `(y_0, ..., y_{N+1})` is the square system
//! `(M_0 + λ M_1) y = 0`: one row per interior equation plus the two
//! boundary rows. Its determinant, expanded symbolically, is proportional
//! to the characteristic polynomial, and the kernel dimension at a root is
//! the geometric multiplicity. Nothing here touches the transfer recursion.

use num_complex::Complex64;

use crate::bc::BoundaryCondition;
use crate::equation::SlEquation;
use crate::poly::Polynomial;
use crate::roots::{cluster_roots, polynomial_roots};
use crate::spectrum::{
    CharacteristicPolynomial, Eigenvalue, SpectrumError, SpectrumKind, SpectrumReport,
};
use crate::tol::{PENCIL_MAX_N, RANK_EPS, REAL_SNAP_TAU};

/// The pencil rows as degree-one polynomials in `λ`.
struct Pencil {
    /// `entries[i][j]` is the (i, j) entry `m0 + λ m1`.
    entries: Vec<Vec<(Complex64, Complex64)>>,
}

fn assemble(eq: &SlEquation, bc: &BoundaryCondition) -> Pencil {
    let n = eq.n();
    let dim = n + 2;
    let zero = (Complex64::default(), Complex64::default());
    let mut entries = vec![vec![zero; dim]; dim];
    // Interior rows: -f_{n-1} y_{n-1} + (f_n + f_{n-1} + q_n - λ w_n) y_n - f_n y_{n+1}.
    for row in 1..=n {
        entries[row - 1][row - 1].0 = -eq.f_at(row - 1);
        entries[row - 1][row].0 = eq.f_at(row) + eq.f_at(row - 1) + eq.q_at(row);
        entries[row - 1][row].1 = -eq.w_at(row);
        entries[row - 1][row + 1].0 = -eq.f_at(row);
    }
    // Boundary rows: a_{i1} y_0 + a_{i2} f_0 (y_1 - y_0) + b_{i1} y_N + b_{i2} f_N (y_{N+1} - y_N).
    for i in 0..2 {
        let row = n + i;
        entries[row][0].0 += bc.a.e[i][0] - bc.a.e[i][1] * eq.f_at(0);
        entries[row][1].0 += bc.a.e[i][1] * eq.f_at(0);
        entries[row][n].0 += bc.b.e[i][0] - bc.b.e[i][1] * eq.f_at(n);
        entries[row][n + 1].0 += bc.b.e[i][1] * eq.f_at(n);
    }
    Pencil { entries }
}

/// Symbolic determinant by Laplace expansion over column subsets, processed
/// one row at a time. Division-free, so no pivot growth enters the
/// coefficients.
fn determinant_polynomial(p: &Pencil) -> Polynomial {
    let dim = p.entries.len();
    let full: u32 = (1u32 << dim) - 1;
    // minors[mask] = det of rows 0..popcount(mask), columns in mask.
    let mut minors: Vec<Option<Polynomial>> = vec![None; 1 << dim];
    minors[0] = Some(Polynomial::constant(Complex64::new(1.0, 0.0)));
    for mask in 1u32..=full {
        let row = mask.count_ones() as usize - 1;
        let mut acc = Polynomial::zero();
        let mut position = 0;
        for col in 0..dim {
            let bit = 1u32 << col;
            if mask & bit == 0 {
                continue;
            }
            let (m0, m1) = p.entries[row][col];
            if m0.norm() != 0.0 || m1.norm() != 0.0 {
                let sub = minors[(mask ^ bit) as usize]
                    .as_ref()
                    .expect("minors filled in mask order");
                let entry = Polynomial::new(vec![m0, m1]);
                let term = sub.mul(&entry);
                if (row + position) % 2 == 0 {
                    acc = acc.add(&term);
                } else {
                    acc = acc.sub(&term);
                }
            }
            position += 1;
        }
        minors[mask as usize] = Some(acc);
    }
    minors[full as usize].take().unwrap()
}

/// Hadamard-style magnitude reference: the product over rows of the largest
/// entry-coefficient magnitude.
fn pencil_scale(p: &Pencil) -> f64 {
    p.entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|(a, b)| a.norm().max(b.norm()))
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE)
        })
        .product()
}

/// Kernel dimension of the evaluated pencil matrix by pivoted Gaussian
/// elimination, giving the geometric multiplicity without the 2x2
/// boundary-matrix route.
fn kernel_dimension_at(p: &Pencil, lambda: Complex64) -> u32 {
    let dim = p.entries.len();
    let mut m: Vec<Vec<Complex64>> = p
        .entries
        .iter()
        .map(|row| row.iter().map(|&(a, b)| a + lambda * b).collect())
        .collect();
    let scale = m
        .iter()
        .flatten()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut rank = 0usize;
    let mut col = 0usize;
    while col < dim && rank < dim {
        let (best_row, best) = (rank..dim)
            .map(|i| (i, m[i][col].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if best <= RANK_EPS * scale {
            col += 1;
            continue;
        }
        m.swap(rank, best_row);
        for i in rank + 1..dim {
            let factor = m[i][col] / m[rank][col];
            for j in col..dim {
                let upper = m[rank][j];
                m[i][j] -= factor * upper;
            }
        }
        rank += 1;
        col += 1;
    }
    (dim - rank) as u32
}

/// Full spectrum through the pencil determinant. Values and analytic
/// multiplicities are extracted exactly as in [`crate::spectrum::eigenvalues`];
/// geometric multiplicities come from the pencil kernel.
pub fn pencil_oracle(
    eq: &SlEquation,
    bc: &BoundaryCondition,
) -> Result<SpectrumReport, SpectrumError> {
    let n = eq.n();
    if n > PENCIL_MAX_N {
        return Err(SpectrumError::SizeLimit {
            n,
            max: PENCIL_MAX_N,
        });
    }
    bc.check_rank2()?;
    let pencil = assemble(eq, bc);
    let det = determinant_polynomial(&pencil);
    let scale = pencil_scale(&pencil);
    let char_poly = CharacteristicPolynomial {
        gamma: det.clone(),
        via_cofactor_sum: det.clone(),
        scale,
    };
    if det.max_coeff_magnitude() <= 1e-10 * scale {
        return Ok(SpectrumReport {
            kind: SpectrumKind::WholePlane,
            eigenvalues: vec![],
            char_poly,
        });
    }
    let self_adjoint = eq.is_real_positive_weight() && bc.is_self_adjoint();
    let roots = polynomial_roots(&det).map_err(|failure| {
        let partial = report_from_roots(&pencil, &char_poly, &failure.partial, self_adjoint);
        SpectrumError::RootFindFailure {
            partial: Box::new(partial),
        }
    })?;
    Ok(report_from_roots(&pencil, &char_poly, &roots, self_adjoint))
}

fn report_from_roots(
    pencil: &Pencil,
    char_poly: &CharacteristicPolynomial,
    roots: &[Complex64],
    self_adjoint: bool,
) -> SpectrumReport {
    let mut eigenvalues: Vec<Eigenvalue> = cluster_roots(roots)
        .into_iter()
        .map(|cl| {
            let mut value = cl.value;
            if self_adjoint && value.im.abs() <= REAL_SNAP_TAU * value.norm().max(1.0) {
                value.im = 0.0;
            }
            let geometric = kernel_dimension_at(pencil, value).clamp(1, 2);
            let analytic = cl.multiplicity as u32;
            Eigenvalue {
                value,
                analytic_mult: analytic,
                geometric_mult: if self_adjoint {
                    analytic.min(2)
                } else {
                    geometric
                },
                certified: analytic <= 2,
            }
        })
        .collect();
    eigenvalues.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    SpectrumReport {
        kind: SpectrumKind::Finite,
        eigenvalues,
        char_poly: char_poly.clone(),
    }
}

/// Coefficient distance between the two characteristic polynomials after
/// normalizing each to unit leading coefficient at its numeric degree,
/// relative to the largest normalized coefficient magnitude. Infinite when
/// the degrees disagree.
pub fn normalized_coefficient_distance(a: &Polynomial, b: &Polynomial) -> f64 {
    let (da, db) = (a.numeric_degree(), b.numeric_degree());
    if da != db {
        return f64::INFINITY;
    }
    let Some(d) = da else { return 0.0 };
    let (la, lb) = (a.coeff(d), b.coeff(d));
    let mut diff: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for k in 0..=d {
        let (x, y) = (a.coeff(k) / la, b.coeff(k) / lb);
        diff = diff.max((x - y).norm());
        scale = scale.max(x.norm()).max(y.norm());
    }
    diff / scale
}
