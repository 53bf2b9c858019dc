//! The discrete Sturm-Liouville equation
//! `-∇(f_n Δy_n) + q_n y_n = λ w_n y_n` on `n ∈ [1, N]`, and the solution
//! sequences it acts on.

use num_complex::Complex64;

/// Coefficient class of an equation. `RealPositiveWeight` is the class over
/// which problems paired with a self-adjoint boundary condition have real
/// spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquationClass {
    Complex,
    Real,
    RealPositiveWeight,
}

/// The coefficient triple `(1/f, q, w)`. `f` has indices `0..=N`, `q` and
/// `w` have indices `1..=N` (stored shifted down by one).
///
/// Construction does not enforce the coefficient invariants; call
/// [`SlEquation::validate`] to collect violations, which the CLI surfaces
/// with positional diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct SlEquation {
    pub f: Vec<Complex64>,
    pub q: Vec<Complex64>,
    pub w: Vec<Complex64>,
    pub class: EquationClass,
}

/// One violated equation invariant, with the offending index.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EquationViolation {
    #[error("N = {0} but at least 2 interior points are required")]
    TooFewPoints(usize),
    #[error("f has {got} entries, expected N+1 = {expected}")]
    FLength { got: usize, expected: usize },
    #[error("q has {got} entries, expected N = {expected}")]
    QLength { got: usize, expected: usize },
    #[error("w has {got} entries, expected N = {expected}")]
    WLength { got: usize, expected: usize },
    #[error("f[{0}] must be nonzero")]
    ZeroF(usize),
    #[error("w[{0}] must be nonzero")]
    ZeroW(usize),
    #[error("class {class:?} requires a real entry at {field}[{index}]")]
    NonRealEntry {
        class: EquationClass,
        field: &'static str,
        index: usize,
    },
    #[error("class RealPositiveWeight requires w[{0}] > 0")]
    NonPositiveWeight(usize),
}

impl SlEquation {
    pub fn new(
        f: Vec<Complex64>,
        q: Vec<Complex64>,
        w: Vec<Complex64>,
        class: EquationClass,
    ) -> Self {
        SlEquation { f, q, w, class }
    }

    /// Convenience constructor from real coefficient slices.
    pub fn from_real(f: &[f64], q: &[f64], w: &[f64], class: EquationClass) -> Self {
        let lift = |s: &[f64]| s.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        SlEquation::new(lift(f), lift(q), lift(w), class)
    }

    /// Number of interior points `N` (from the length of `f`).
    pub fn n(&self) -> usize {
        self.f.len().saturating_sub(1)
    }

    /// `f_n` for `n ∈ [0, N]`.
    pub fn f_at(&self, n: usize) -> Complex64 {
        self.f[n]
    }

    /// `q_n` for `n ∈ [1, N]`.
    pub fn q_at(&self, n: usize) -> Complex64 {
        self.q[n - 1]
    }

    /// `w_n` for `n ∈ [1, N]`.
    pub fn w_at(&self, n: usize) -> Complex64 {
        self.w[n - 1]
    }

    /// Checks every invariant and returns the full violation list, empty on
    /// a valid equation.
    pub fn validate(&self) -> Vec<EquationViolation> {
        let mut out = Vec::new();
        let n = self.n();
        if n < 2 {
            out.push(EquationViolation::TooFewPoints(n));
        }
        if self.q.len() != n {
            out.push(EquationViolation::QLength {
                got: self.q.len(),
                expected: n,
            });
        }
        if self.w.len() != n {
            out.push(EquationViolation::WLength {
                got: self.w.len(),
                expected: n,
            });
        }
        for (i, v) in self.f.iter().enumerate() {
            if v.norm() == 0.0 {
                out.push(EquationViolation::ZeroF(i));
            }
        }
        for (i, v) in self.w.iter().enumerate() {
            if v.norm() == 0.0 {
                out.push(EquationViolation::ZeroW(i + 1));
            }
        }
        if matches!(
            self.class,
            EquationClass::Real | EquationClass::RealPositiveWeight
        ) {
            for (field, seq, off) in [("f", &self.f, 0usize), ("q", &self.q, 1), ("w", &self.w, 1)]
            {
                for (i, v) in seq.iter().enumerate() {
                    if v.im != 0.0 {
                        out.push(EquationViolation::NonRealEntry {
                            class: self.class,
                            field,
                            index: i + off,
                        });
                    }
                }
            }
        }
        if self.class == EquationClass::RealPositiveWeight {
            for (i, v) in self.w.iter().enumerate() {
                if !(v.re > 0.0) || v.im != 0.0 {
                    out.push(EquationViolation::NonPositiveWeight(i + 1));
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Whether the equation lies in the real-positive-weight class, entrywise
    /// (regardless of the declared class tag).
    pub fn is_real_positive_weight(&self) -> bool {
        self.f.iter().all(|v| v.im == 0.0 && v.re != 0.0)
            && self.q.iter().all(|v| v.im == 0.0)
            && self.w.iter().all(|v| v.im == 0.0 && v.re > 0.0)
    }
}

/// A solution sequence `y_0..y_{N+1}` together with its quasi-derivatives
/// `qd_n = f_n (y_{n+1} - y_n)` for `n ∈ [0, N]`. The pairing holds exactly
/// by construction in [`crate::transfer::solve_ivp`].
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSequence {
    pub y: Vec<Complex64>,
    pub qd: Vec<Complex64>,
}

impl SolutionSequence {
    /// `N` implied by the sequence lengths.
    pub fn n(&self) -> usize {
        self.qd.len().saturating_sub(1)
    }

    /// Boundary data `(y_0, f_0 Δy_0, y_N, f_N Δy_N)` entering the boundary
    /// condition.
    pub fn boundary_data(&self) -> [Complex64; 4] {
        let n = self.n();
        [self.y[0], self.qd[0], self.y[n], self.qd[n]]
    }

    pub fn scale(&self, s: Complex64) -> SolutionSequence {
        SolutionSequence {
            y: self.y.iter().map(|&v| v * s).collect(),
            qd: self.qd.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.y
            .iter()
            .chain(self.qd.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}
