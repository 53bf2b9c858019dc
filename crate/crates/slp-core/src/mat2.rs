//! 2x2 complex matrices and thresholded rank decisions.

use num_complex::Complex64;

use crate::tol::RANK_EPS;

/// A 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2 {
    pub e: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub fn new(e: [[Complex64; 2]; 2]) -> Self {
        Mat2 { e }
    }

    pub fn from_real(e: [[f64; 2]; 2]) -> Self {
        Mat2 {
            e: [
                [Complex64::new(e[0][0], 0.0), Complex64::new(e[0][1], 0.0)],
                [Complex64::new(e[1][0], 0.0), Complex64::new(e[1][1], 0.0)],
            ],
        }
    }

    pub fn identity() -> Self {
        Mat2::from_real([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn zero() -> Self {
        Mat2::default()
    }

    /// The symplectic form `E = [[0, 1], [-1, 0]]` of the self-adjointness
    /// test `A E A* = B E B*`.
    pub fn symplectic() -> Self {
        Mat2::from_real([[0.0, 1.0], [-1.0, 0.0]])
    }

    pub fn det(&self) -> Complex64 {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    /// Transposed adjugate `[[m22, -m21], [-m12, m11]]`, the coefficient
    /// pattern appearing in the eigenvalue derivative kernels.
    pub fn adjugate_transpose(&self) -> Mat2 {
        Mat2::new([[self.e[1][1], -self.e[1][0]], [-self.e[0][1], self.e[0][0]]])
    }

    /// Adjugate `[[m22, -m12], [-m21, m11]]`, so `M * adj(M) = det(M) * I`.
    pub fn adjugate(&self) -> Mat2 {
        Mat2::new([[self.e[1][1], -self.e[0][1]], [-self.e[1][0], self.e[0][0]]])
    }

    pub fn conj_transpose(&self) -> Mat2 {
        Mat2::new([
            [self.e[0][0].conj(), self.e[1][0].conj()],
            [self.e[0][1].conj(), self.e[1][1].conj()],
        ])
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new([[self.e[0][0], self.e[1][0]], [self.e[0][1], self.e[1][1]]])
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] = self.e[i][0] * other.e[0][j] + self.e[i][1] * other.e[1][j];
            }
        }
        out
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] += other.e[i][j];
            }
        }
        out
    }

    pub fn sub(&self, other: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] -= other.e[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] *= s;
            }
        }
        out
    }

    /// Inverse, valid when the determinant is comfortably nonzero.
    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        Some(self.adjugate().scale(Complex64::new(1.0, 0.0) / d))
    }

    pub fn mul_vec(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.e[0][0] * v[0] + self.e[0][1] * v[1],
            self.e[1][0] * v[0] + self.e[1][1] * v[1],
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.e.iter().flatten().all(|c| c.im.abs() <= tol)
    }
}

/// Rank of a 2x2 matrix by largest-pivot elimination with threshold
/// `RANK_EPS * scale`. `scale` must be a positive magnitude reference for
/// the matrix entries; the result is invariant under rescaling the matrix
/// and `scale` together.
pub fn mat2_rank(m: &Mat2, scale: f64) -> u8 {
    rank_rows(&[[m.e[0][0], m.e[0][1]], [m.e[1][0], m.e[1][1]]], scale)
}

/// Rank of the 2x4 matrix `(A, B)` with the same thresholding as
/// [`mat2_rank`].
pub fn rank_2x4(a: &Mat2, b: &Mat2, scale: f64) -> u8 {
    rank_rows(
        &[
            [a.e[0][0], a.e[0][1], b.e[0][0], b.e[0][1]],
            [a.e[1][0], a.e[1][1], b.e[1][0], b.e[1][1]],
        ],
        scale,
    )
}

fn rank_rows<const W: usize>(rows: &[[Complex64; W]; 2], scale: f64) -> u8 {
    let tol = RANK_EPS * scale;
    let mut pivot = (0usize, 0usize, 0.0f64);
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if x.norm() > pivot.2 {
                pivot = (i, j, x.norm());
            }
        }
    }
    if pivot.2 <= tol {
        return 0;
    }
    let (pi, pj, _) = pivot;
    let other = 1 - pi;
    let factor = rows[other][pj] / rows[pi][pj];
    let residual = (0..W)
        .filter(|&j| j != pj)
        .map(|j| (rows[other][j] - factor * rows[pi][j]).norm())
        .fold(0.0, f64::max);
    if residual > tol {
        2
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity_is_two() {
        assert_eq!(mat2_rank(&Mat2::identity(), 1.0), 2);
    }

    #[test]
    fn rank_one_row_matrix() {
        let m = Mat2::from_real([[1.0, 2.0], [0.0, 0.0]]);
        assert_eq!(mat2_rank(&m, 1.0), 1);
        assert_eq!(mat2_rank(&Mat2::zero(), 1.0), 0);
    }

    #[test]
    fn rank_scale_invariance() {
        let m = Mat2::from_real([[1.0, 2.0], [2.0, 4.0 + 1e-12]]);
        assert_eq!(mat2_rank(&m, 4.0), 1);
        let s = 1e6;
        assert_eq!(mat2_rank(&m.scale(Complex64::new(s, 0.0)), 4.0 * s), 1);
    }

    #[test]
    fn adjugate_identity() {
        let m = Mat2::from_real([[3.0, 1.0], [2.0, 5.0]]);
        let prod = m.mul(&m.adjugate());
        let d = m.det();
        assert!((prod.e[0][0] - d).norm() < 1e-12);
        assert!((prod.e[1][1] - d).norm() < 1e-12);
        assert!(prod.e[0][1].norm() < 1e-12);
        assert!(prod.e[1][0].norm() < 1e-12);
    }
}
