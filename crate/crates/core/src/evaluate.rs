//! Overflow-safe numerical evaluation of `f`, `log|f|` and `f'/f`.
//!
//! At any point one exponential term dominates (two near a strip). Scaling
//! every term by `e^{-M}` with `M = max_j Re Q_j(z)` keeps the dominant
//! terms at unit magnitude and lets the rest underflow harmlessly, so
//! evaluation stays finite for |z| in the thousands and exponent degrees
//! around ten.

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use num_complex::Complex64;

/// `mantissa · e^{log_offset}` with the offset kept separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: Complex64,
    pub log_offset: f64,
}

impl ScaledValue {
    /// log of the represented magnitude; `-inf` at a zero.
    pub fn log_modulus(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_offset
    }

    /// Argument of the represented value (the offset is a positive real
    /// factor, so the mantissa carries the full phase).
    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }
}

/// Evaluates `f(z)` as `(Σ_j P_j(z)·e^{Q_j(z)-M}, M)` with
/// `M = max_j Re Q_j(z)` (0 for the zero function).
pub fn eval_scaled(f: &ExpPoly, z: Complex64) -> ScaledValue {
    let offset = max_exponent_re(f, z);
    ScaledValue {
        mantissa: mantissa_with_offset(f, z, offset),
        log_offset: offset,
    }
}

/// `log|f(z)|`. Errors at an exact zero of the scaled sum.
pub fn log_abs(f: &ExpPoly, z: Complex64) -> Result<f64> {
    let v = eval_scaled(f, z);
    if v.mantissa == Complex64::new(0.0, 0.0) {
        return Err(Error::EvaluationAtZero);
    }
    Ok(v.log_modulus())
}

/// `f'(z)/f(z)`. Numerator and denominator share the same offset `M`, so the
/// scale factors cancel exactly in the ratio.
pub fn logderiv(f: &ExpPoly, z: Complex64) -> Result<Complex64> {
    let offset = max_exponent_re(f, z);
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = Complex64::new(0.0, 0.0);
    for t in f.terms() {
        let p = t.coeff().eval(z);
        let dp = t.coeff().derivative().eval(z);
        let dq = t.exponent().derivative().eval(z);
        let scale = (t.exponent().eval(z) - offset).exp();
        den += p * scale;
        num += (dp + dq * p) * scale;
    }
    if den == Complex64::new(0.0, 0.0) {
        return Err(Error::EvaluationAtZero);
    }
    Ok(num / den)
}

fn max_exponent_re(f: &ExpPoly, z: Complex64) -> f64 {
    let m = f
        .terms()
        .iter()
        .map(|t| t.exponent().eval(z).re)
        .fold(f64::NEG_INFINITY, f64::max);
    if m.is_finite() {
        m
    } else {
        0.0 // zero function: mantissa 0, offset 0
    }
}

fn mantissa_with_offset(f: &ExpPoly, z: Complex64, offset: f64) -> Complex64 {
    f.terms()
        .iter()
        .map(|t| t.coeff().eval(z) * (t.exponent().eval(z) - offset).exp())
        .sum()
}

/// Index of the term whose exponent real part attains the max at `z`.
/// Used by tests to compare numerical dominance against the indicator.
pub fn dominant_term_index(f: &ExpPoly, z: Complex64) -> Option<usize> {
    f.terms()
        .iter()
        .enumerate()
        .map(|(i, t)| (i, t.exponent().eval(z).re))
        .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite exponent"))
        .map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rpoly(coeffs: &[f64]) -> Poly {
        Poly::new(coeffs.iter().map(|&x| c(x, 0.0)).collect())
    }

    fn exp_z() -> ExpPoly {
        ExpPoly::from_pairs(vec![(rpoly(&[1.0]), rpoly(&[0.0, 1.0]))])
    }

    /// e^z + e^{-z}
    fn two_cosh() -> ExpPoly {
        ExpPoly::from_pairs(vec![
            (rpoly(&[1.0]), rpoly(&[0.0, 1.0])),
            (rpoly(&[1.0]), rpoly(&[0.0, -1.0])),
        ])
    }

    /// e^{z^2} + e^{-z^2}
    fn two_cosh_sq() -> ExpPoly {
        ExpPoly::from_pairs(vec![
            (rpoly(&[1.0]), rpoly(&[0.0, 0.0, 1.0])),
            (rpoly(&[1.0]), rpoly(&[0.0, 0.0, -1.0])),
        ])
    }

    #[test]
    fn single_term_far_out() {
        let v = eval_scaled(&exp_z(), c(1000.0, 0.0));
        assert_abs_diff_eq!((v.mantissa - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.log_offset, 1000.0);
    }

    #[test]
    fn cosh_at_origin() {
        let v = eval_scaled(&two_cosh(), c(0.0, 0.0));
        assert_abs_diff_eq!((v.mantissa - c(2.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.log_offset, 0.0);
    }

    #[test]
    fn purely_oscillatory_on_diagonal() {
        // z = 5 e^{iπ/4}: z^2 = 25i, both exponents purely imaginary.
        let z = Complex64::from_polar(5.0, std::f64::consts::FRAC_PI_4);
        let v = eval_scaled(&two_cosh_sq(), z);
        assert_abs_diff_eq!(v.log_offset, 0.0, epsilon = 1e-12);
        let expected = (c(0.0, 25.0)).exp() + (c(0.0, -25.0)).exp();
        assert_abs_diff_eq!((v.mantissa - expected).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn no_overflow_at_extreme_scale() {
        // degree-10 exponent at |z| = 1000: Re Q ~ 1e30 stays in the offset.
        let f = ExpPoly::from_pairs(vec![
            (rpoly(&[1.0]), Poly::monomial(c(1.0, 0.0), 10)),
            (rpoly(&[1.0]), Poly::monomial(c(-1.0, 0.0), 10)),
        ]);
        let v = eval_scaled(&f, c(1000.0, 0.5));
        assert!(v.mantissa.re.is_finite() && v.mantissa.im.is_finite());
        assert!(v.log_offset.is_finite());
        assert!(v.log_offset > 1e29);
    }

    #[test]
    fn logderiv_of_exp_z() {
        for &z in &[c(0.0, 0.0), c(2.0, -3.0), c(100.0, 40.0)] {
            let ld = logderiv(&exp_z(), z).unwrap();
            assert_abs_diff_eq!((ld - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn logderiv_of_sin_is_cot() {
        // sin z = (e^{iz} - e^{-iz}) / 2i
        let half_i = c(0.0, -0.5); // 1/(2i)
        let f = ExpPoly::from_pairs(vec![
            (Poly::constant(half_i), Poly::monomial(c(0.0, 1.0), 1)),
            (Poly::constant(-half_i), Poly::monomial(c(0.0, -1.0), 1)),
        ]);
        let z = c(std::f64::consts::FRAC_PI_4, 0.0);
        let ld = logderiv(&f, z).unwrap();
        // cot(π/4) = 1
        assert_abs_diff_eq!((ld - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn logderiv_of_gaussian_term() {
        let f = ExpPoly::from_pairs(vec![(rpoly(&[1.0]), rpoly(&[0.0, 0.0, 1.0]))]);
        let ld = logderiv(&f, c(3.0, 0.0)).unwrap();
        assert_abs_diff_eq!((ld - c(6.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn log_abs_matches_direct_at_moderate_size() {
        let f = two_cosh();
        let z = c(3.0, 1.5);
        let direct = (z.exp() + (-z).exp()).norm().ln();
        assert_abs_diff_eq!(log_abs(&f, z).unwrap(), direct, epsilon = 1e-12);
    }

    #[test]
    fn log_abs_errors_at_zero() {
        // e^z - e^z would merge to the empty sum; use sin at 0 instead.
        let half_i = c(0.0, -0.5);
        let f = ExpPoly::from_pairs(vec![
            (Poly::constant(half_i), Poly::monomial(c(0.0, 1.0), 1)),
            (Poly::constant(-half_i), Poly::monomial(c(0.0, -1.0), 1)),
        ]);
        assert!(matches!(
            log_abs(&f, c(0.0, 0.0)),
            Err(Error::EvaluationAtZero)
        ));
    }
}
