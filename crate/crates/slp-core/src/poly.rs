//! Dense complex polynomials in the spectral parameter.

use num_complex::Complex64;

use crate::tol::NUMERIC_DEGREE_TAU;

/// A polynomial with complex coefficients, stored densely: `coeffs[k]` is the
/// coefficient of `lambda^k`. Trailing coefficients may be numerically zero;
/// degree-dependent logic goes through [`Polynomial::numeric_degree`].
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![] }
    }

    pub fn constant(c: Complex64) -> Self {
        Polynomial { coeffs: vec![c] }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Polynomial {
            coeffs: coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
    }

    /// Coefficient of `lambda^k`, zero beyond the stored length.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn max_coeff_magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest `k` with `|coeffs[k]| > tau * max_j |coeffs[j]|`, or `None`
    /// when every coefficient is below the threshold (the zero polynomial).
    pub fn numeric_degree_with(&self, tau: f64) -> Option<usize> {
        let max = self.max_coeff_magnitude();
        if max == 0.0 {
            return None;
        }
        self.coeffs.iter().rposition(|c| c.norm() > tau * max)
    }

    /// [`numeric_degree_with`](Self::numeric_degree_with) at the crate-wide
    /// threshold [`NUMERIC_DEGREE_TAU`].
    pub fn numeric_degree(&self) -> Option<usize> {
        self.numeric_degree_with(NUMERIC_DEGREE_TAU)
    }

    /// Copy truncated at the numeric degree; the zero polynomial for `None`.
    pub fn trimmed(&self) -> Polynomial {
        match self.numeric_degree() {
            Some(d) => Polynomial::new(self.coeffs[..=d].to_vec()),
            None => Polynomial::zero(),
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex64::default(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Formal derivative with respect to `lambda`.
    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, &c)| c * (k as f64 + 1.0))
                .collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let mut acc = Complex64::default();
        for &c in self.coeffs.iter().rev() {
            acc = acc * lambda + c;
        }
        acc
    }

    /// Values of the polynomial and its first `k` derivatives at `lambda`,
    /// by repeated synthetic division. Entry `j` is the `j`-th derivative.
    pub fn eval_derivatives(&self, lambda: Complex64, k: usize) -> Vec<Complex64> {
        let mut work = self.coeffs.clone();
        let mut out = Vec::with_capacity(k + 1);
        let mut factorial = 1.0;
        for j in 0..=k {
            if work.is_empty() {
                out.push(Complex64::default());
                continue;
            }
            // One synthetic division pass leaves the quotient in place and
            // the remainder (the value) at the end.
            let mut acc = Complex64::default();
            for c in work.iter_mut().rev() {
                acc = acc * lambda + *c;
                *c = acc;
            }
            let value = work.remove(0);
            if j > 0 {
                factorial *= j as f64;
            }
            out.push(value * factorial);
        }
        out
    }

    /// Magnitude reference for values of the polynomial near `lambda`:
    /// `max|coeff| * max(1, |lambda|)^deg`.
    pub fn eval_scale(&self, lambda: Complex64) -> f64 {
        let deg = self.numeric_degree().unwrap_or(0);
        self.max_coeff_magnitude() * lambda.norm().max(1.0).powi(deg as i32)
    }
}
