//! Deterministic polynomial root finding: balanced companion-matrix
//! eigenvalues refined by Newton polishing, plus multiplicity clustering.
//!
//! Degrees here are small (bounded by the interior point count), so the
//! explicit shifted QR iteration below favours robustness and determinism
//! over speed.

use num_complex::Complex64;

use crate::poly::Polynomial;
use crate::tol::CLUSTER_TAU;

/// Roots of `p`, one entry per root counting multiplicity, sorted by real
/// part then imaginary part. `Err` carries the sweeps-exhausted diagnostic
/// together with the best available root set.
pub fn polynomial_roots(p: &Polynomial) -> Result<Vec<Complex64>, RootFindFailure> {
    let trimmed = p.trimmed();
    let deg = match trimmed.numeric_degree() {
        None | Some(0) => return Ok(vec![]),
        Some(d) => d,
    };
    let lead = trimmed.coeff(deg);
    let monic: Vec<Complex64> = (0..deg).map(|k| trimmed.coeff(k) / lead).collect();

    let mut roots = match deg {
        1 => vec![-monic[0]],
        2 => quadratic_roots(monic[0], monic[1]),
        _ => {
            let mut h = companion(&monic);
            balance(&mut h);
            hessenberg_qr_eigenvalues(&mut h)?
        }
    };
    for r in roots.iter_mut() {
        *r = newton_polish(&trimmed, *r);
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

#[derive(Clone, Debug, thiserror::Error)]
#[error("QR iteration failed to converge; {} roots recovered", partial.len())]
pub struct RootFindFailure {
    /// Deflated eigenvalues plus diagonal estimates for the stuck block.
    pub partial: Vec<Complex64>,
}

/// Roots of `x^2 + b x + a`, using the numerically stable sign choice.
fn quadratic_roots(a: Complex64, b: Complex64) -> Vec<Complex64> {
    let disc = (b * b - a * 4.0).sqrt();
    // Pick the sign making |b ∓ disc| large.
    let q = if (b + disc).norm() >= (b - disc).norm() {
        -(b + disc) * 0.5
    } else {
        -(b - disc) * 0.5
    };
    if q.norm() == 0.0 {
        return vec![Complex64::default(), Complex64::default()];
    }
    vec![q, a / q]
}

/// Companion matrix of the monic polynomial with low-order coefficients
/// `monic` (length = degree): subdiagonal ones, last column `-monic`.
fn companion(monic: &[Complex64]) -> Vec<Vec<Complex64>> {
    let d = monic.len();
    let mut h = vec![vec![Complex64::default(); d]; d];
    for i in 1..d {
        h[i][i - 1] = Complex64::new(1.0, 0.0);
    }
    for i in 0..d {
        h[i][d - 1] = -monic[i];
    }
    h
}

/// Parlett-Reinsch style balancing by powers of two; a diagonal similarity,
/// so eigenvalues are unchanged and the Hessenberg pattern is preserved.
fn balance(h: &mut [Vec<Complex64>]) {
    let d = h.len();
    let radix = 2.0f64;
    for _ in 0..32 {
        let mut converged = true;
        for i in 0..d {
            let mut row = 0.0;
            let mut col = 0.0;
            for j in 0..d {
                if j != i {
                    row += h[i][j].norm();
                    col += h[j][i].norm();
                }
            }
            if row == 0.0 || col == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let mut c = col;
            let s = col + row;
            while c < row / radix {
                f *= radix;
                c *= radix * radix;
            }
            while c > row * radix {
                f /= radix;
                c /= radix * radix;
            }
            if (col * f + row / f) < 0.95 * s {
                converged = false;
                let g = 1.0 / f;
                for j in 0..d {
                    h[i][j] *= g;
                }
                for j in 0..d {
                    h[j][i] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by explicit single-shift QR
/// with Wilkinson shifts and occasional exceptional shifts.
fn hessenberg_qr_eigenvalues(
    h: &mut Vec<Vec<Complex64>>,
) -> Result<Vec<Complex64>, RootFindFailure> {
    let d = h.len();
    let mut eigs: Vec<Complex64> = Vec::with_capacity(d);
    let mut hi = d; // active block is rows/cols 0..hi
    let mut iters_since_deflation = 0usize;
    let max_total = 40 * d.max(4);
    let mut total = 0usize;

    while hi > 0 {
        if total > max_total {
            let mut partial = eigs.clone();
            for i in 0..hi {
                partial.push(h[i][i]);
            }
            return Err(RootFindFailure { partial });
        }
        // Deflate negligible subdiagonals from the bottom of the block.
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h[lo - 1][lo - 1].norm() + h[lo][lo].norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if h[lo][lo - 1].norm() <= f64::EPSILON * s {
                h[lo][lo - 1] = Complex64::default();
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 || (lo > 0 && h[lo][lo - 1].norm() == 0.0 && lo == hi - 1) {
            // 1x1 block deflated.
            eigs.push(h[hi - 1][hi - 1]);
            hi -= 1;
            iters_since_deflation = 0;
            continue;
        }
        if hi - lo == 1 {
            eigs.push(h[lo][lo]);
            hi -= 1;
            iters_since_deflation = 0;
            continue;
        }

        // Shift: Wilkinson from the trailing 2x2 of the active block, or an
        // exceptional shift when progress stalls.
        let m = hi - 1;
        let shift = if iters_since_deflation > 0 && iters_since_deflation % 12 == 0 {
            h[m][m] + Complex64::new(0.75 * h[m][m - 1].norm() + f64::EPSILON, 0.0)
        } else {
            wilkinson_shift(h[m - 1][m - 1], h[m - 1][m], h[m][m - 1], h[m][m])
        };

        qr_step(h, lo, hi, shift);
        iters_since_deflation += 1;
        total += 1;
    }
    Ok(eigs)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det * 4.0).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR sweep on the active block `lo..hi`:
/// `H - μI = QR`, `H ← RQ + μI` via complex Givens rotations.
fn qr_step(h: &mut [Vec<Complex64>], lo: usize, hi: usize, shift: Complex64) {
    let n = hi - lo;
    if n < 2 {
        return;
    }
    for i in lo..hi {
        h[i][i] -= shift;
    }
    // Left rotations annihilating the subdiagonal.
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(n - 1);
    for i in lo..hi - 1 {
        let (c, s) = givens(h[i][i], h[i + 1][i]);
        rotations.push((c, s));
        for j in i..hi {
            let x = h[i][j];
            let y = h[i + 1][j];
            h[i][j] = x * c + y * s;
            h[i + 1][j] = -x * s.conj() + y * c;
        }
    }
    // Right application restores Hessenberg form.
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let col = lo + idx;
        let top = (col + 2).min(hi);
        for i in lo..top {
            let x = h[i][col];
            let y = h[i][col + 1];
            h[i][col] = x * c + y * s.conj();
            h[i][col + 1] = -x * s + y * c;
        }
    }
    for i in lo..hi {
        h[i][i] += shift;
    }
}

/// Complex Givens pair `(c real, s)` with `c^2 + |s|^2 = 1` annihilating `b`
/// against `a`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::default());
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// A few Newton steps on `p`, keeping the iterate with the smallest
/// residual. Near multiple roots the iteration degrades gracefully to a
/// contraction, which the clustering absorbs.
fn newton_polish(p: &Polynomial, start: Complex64) -> Complex64 {
    let mut best = start;
    let mut best_val = p.eval(start).norm();
    let mut z = start;
    for _ in 0..8 {
        let d = p.eval_derivatives(z, 1);
        let dv = d[1];
        if dv.norm() == 0.0 {
            break;
        }
        let step = d[0] / dv;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        let v = p.eval(z).norm();
        if v < best_val {
            best_val = v;
            best = z;
        }
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    best
}

/// A root cluster: the mean value and the number of members (the analytic
/// multiplicity estimate).
#[derive(Clone, Copy, Debug)]
pub struct RootCluster {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Groups sorted roots into clusters of pairwise distance at most
/// `CLUSTER_TAU * max(1, |λ|)` (single linkage), returning cluster means,
/// sorted by real then imaginary part.
pub fn cluster_roots(roots: &[Complex64]) -> Vec<RootCluster> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            let tol = CLUSTER_TAU * roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut sums: std::collections::HashMap<usize, (Complex64, usize)> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        let e = sums.entry(r).or_insert((Complex64::default(), 0));
        e.0 += roots[i];
        e.1 += 1;
    }
    let mut out: Vec<RootCluster> = sums
        .into_values()
        .map(|(sum, count)| RootCluster {
            value: sum / count as f64,
            multiplicity: count,
        })
        .collect();
    out.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    out
}
