//! Complex-coefficient polynomials in one variable, ascending degree.
//!
//! The symbolic layer is exact: trimming drops coefficients that are exactly
//! zero, never "small" ones. Tolerances belong to the numeric modules.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// `coeffs[k]` multiplies `z^k`. The empty list is the zero polynomial;
/// otherwise the last coefficient is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Builds a polynomial, trimming trailing exact zeros.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `c·z^k`.
    pub fn monomial(c: Complex64, k: usize) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return Poly::zero();
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of a nonzero polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Coefficient of `z^k` (zero beyond the stored length).
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeff(0)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Derivative: `[c0, c1, c2, ...]` maps to `[c1, 2c2, ...]`.
    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Poly::new(coeffs)
    }

    /// Replaces `z` by `a·z`; coefficient of `z^k` picks up `a^k`.
    pub fn scale_argument(&self, a: Complex64) -> Poly {
        let mut factor = Complex64::new(1.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                let out = c * factor;
                factor *= a;
                out
            })
            .collect();
        Poly::new(coeffs)
    }

    /// Drops the constant term, returning it.
    pub fn take_constant_term(&mut self) -> Complex64 {
        if self.coeffs.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let c = self.coeffs[0];
        self.coeffs[0] = Complex64::new(0.0, 0.0);
        self.trim();
        c
    }

    fn trim(&mut self) {
        while let Some(&last) = self.coeffs.last() {
            if last == Complex64::new(0.0, 0.0) {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    /// Lexicographic order on coefficient lists (shorter lists padded with
    /// zeros), used to keep term lists in a canonical order.
    pub fn lex_cmp(&self, other: &Poly) -> std::cmp::Ordering {
        let n = self.coeffs.len().max(other.coeffs.len());
        for k in 0..n {
            let (x, y) = (self.coeff(k), other.coeff(k));
            let ord = (x.re, x.im)
                .partial_cmp(&(y.re, y.im))
                .expect("finite coefficients");
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        Poly::new(coeffs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        Poly::new(coeffs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs =
            vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::new(coeffs)
    }
}
