//! Proximity and characteristic functions by circle quadrature.
//!
//! For entire `f`, `T(r,f) = m(r,f) = (1/2π)∫ log⁺|f(re^{iθ})| dθ`. The
//! integrand has cusps where the dominant exponential term changes — exactly
//! at the critical angles — so panels are split there up front, and the
//! `log⁺` kink (`|f| = 1` crossings, not known a priori) is handled by
//! bisecting sign-mixed panels.
//!
//! `m(r,1/f)` comes from Jensen's formula instead of direct quadrature of
//! `log⁺(1/|f|)`: near-circle zeros make the direct integral unstable while
//! the zero data is already certified. The direct route stays available as
//! a cross-check.

use crate::error::{Error, Result};
use crate::evaluate::eval_scaled;
use crate::exppoly::ExpPoly;
use crate::geometry::critical_rays;
use crate::zeros::ZeroSet;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Width below which a sign-mixed (log⁺ kink) panel is accepted; the
/// integrand is ~0 there, so the contribution is O(width²).
const KINK_MIN_WIDTH: f64 = 1e-6;
const MAX_PANEL_DEPTH: usize = 40;

/// A quadrature result with its accumulated error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Proximity {
    pub value: f64,
    pub error_estimate: f64,
}

/// Quadrature controls. `base_panels` is the initial subdivision of each
/// inter-cusp interval.
#[derive(Debug, Clone)]
pub struct ProximityOptions {
    pub base_panels: usize,
}

impl Default for ProximityOptions {
    fn default() -> Self {
        ProximityOptions { base_panels: 8 }
    }
}

/// `m(r,f) = T(r,f)` for entire `f`: adaptive Simpson over `[0,2π)` with
/// forced breaks at the critical angles, refined until the estimated error
/// is below `max(1e-6, 1e-8·|result|)`.
pub fn proximity(f: &ExpPoly, r: f64) -> Result<Proximity> {
    proximity_with(f, r, &ProximityOptions::default())
}

pub fn proximity_with(f: &ExpPoly, r: f64, opts: &ProximityOptions) -> Result<Proximity> {
    if r <= 0.0 {
        return Err(Error::Config(format!("proximity needs r > 0, got {r}")));
    }
    let g = |theta: f64| log_plus_abs(f, r, theta);
    integrate_circle(f, &g, opts)
}

/// Direct quadrature of `log⁺(1/|f|)` on the circle. Unstable when zeros
/// graze the circle; kept as a cross-check for the Jensen route.
pub fn proximity_inverse_direct(f: &ExpPoly, r: f64) -> Result<Proximity> {
    let g = |theta: f64| {
        let v = eval_scaled(f, Complex64::from_polar(r, theta));
        if v.mantissa == Complex64::new(0.0, 0.0) {
            return 0.0; // measure-zero event; log⁺(1/0) clamped by the panel around it
        }
        (-v.log_modulus()).max(0.0)
    };
    integrate_circle(f, &g, &ProximityOptions::default())
}

fn log_plus_abs(f: &ExpPoly, r: f64, theta: f64) -> f64 {
    let v = eval_scaled(f, Complex64::from_polar(r, theta));
    if v.mantissa == Complex64::new(0.0, 0.0) {
        return 0.0;
    }
    v.log_modulus().max(0.0)
}

fn integrate_circle(
    f: &ExpPoly,
    g: &dyn Fn(f64) -> f64,
    opts: &ProximityOptions,
) -> Result<Proximity> {
    // Forced breaks at the cusp angles of the dominant-term envelope.
    // Functions of order zero (plain polynomials, constants) have none.
    let mut breaks: Vec<f64> = match f.normalize() {
        Ok(nf) => critical_rays(&nf)?.iter().map(|ray| ray.angle).collect(),
        Err(Error::NotExponentialOfPositiveOrder) => Vec::new(),
        Err(e) => return Err(e),
    };
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    breaks.dedup();
    let intervals: Vec<(f64, f64)> = if breaks.is_empty() {
        vec![(0.0, TAU)]
    } else {
        let mut iv: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();
        iv.push((breaks[breaks.len() - 1], breaks[0] + TAU));
        iv
    };

    // Coarse pass to set the absolute tolerance from the result size.
    let mut coarse = 0.0;
    for &(a, b) in &intervals {
        coarse += composite_simpson(g, a, b, 64);
    }
    let coarse = coarse / TAU;
    let target = (1e-6_f64).max(1e-8 * coarse.abs()) * 0.5;

    let mut total = 0.0;
    let mut estimate = 0.0;
    for &(a, b) in &intervals {
        let n = opts.base_panels.max(1);
        for k in 0..n {
            let pa = a + (b - a) * k as f64 / n as f64;
            let pb = a + (b - a) * (k + 1) as f64 / n as f64;
            // budget proportional to width, in un-normalized units
            let tol = target * (pb - pa);
            let mut panel = Panel::new(g, pa, pb);
            total += panel.refine(g, tol, MAX_PANEL_DEPTH, &mut estimate)?;
        }
    }
    Ok(Proximity {
        value: total / TAU,
        error_estimate: estimate / TAU,
    })
}

fn composite_simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        let x0 = a + h * k as f64;
        sum += h / 6.0 * (g(x0) + 4.0 * g(x0 + 0.5 * h) + g(x0 + h));
    }
    sum
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
}

impl Panel {
    fn new(g: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Panel {
        let m = 0.5 * (a + b);
        Panel {
            a,
            b,
            fa: g(a),
            fm: g(m),
            fb: g(b),
        }
    }

    fn simpson(&self) -> f64 {
        (self.b - self.a) / 6.0 * (self.fa + 4.0 * self.fm + self.fb)
    }

    /// A `log⁺` kink sits inside when some node is clamped to zero and some
    /// is not; such panels are bisected regardless of the Simpson estimate.
    fn sign_mixed(&self) -> bool {
        let pos = [self.fa, self.fm, self.fb].map(|v| v > 0.0);
        pos != [true; 3] && pos != [false; 3]
    }

    fn refine(
        &mut self,
        g: &dyn Fn(f64) -> f64,
        tol: f64,
        depth: usize,
        estimate: &mut f64,
    ) -> Result<f64> {
        let m = 0.5 * (self.a + self.b);
        let mut left = Panel {
            a: self.a,
            b: m,
            fa: self.fa,
            fm: g(0.5 * (self.a + m)),
            fb: self.fm,
        };
        let mut right = Panel {
            a: m,
            b: self.b,
            fa: self.fm,
            fm: g(0.5 * (m + self.b)),
            fb: self.fb,
        };
        let whole = self.simpson();
        let halves = left.simpson() + right.simpson();
        let diff = halves - whole;
        let width = self.b - self.a;

        let kink = self.sign_mixed() && width >= KINK_MIN_WIDTH;
        if !kink && diff.abs() < 15.0 * tol {
            *estimate += diff.abs() / 15.0;
            return Ok(halves + diff / 15.0);
        }
        if depth == 0 {
            if self.sign_mixed() && width < KINK_MIN_WIDTH {
                *estimate += diff.abs() / 15.0 + width * self.fm.abs();
                return Ok(halves);
            }
            return Err(Error::QuadratureNonConvergence(format!(
                "panel [{:.9}, {:.9}] residual {:.3e} at max depth",
                self.a,
                self.b,
                diff.abs() / 15.0
            )));
        }
        Ok(left.refine(g, 0.5 * tol, depth - 1, estimate)?
            + right.refine(g, 0.5 * tol, depth - 1, estimate)?)
    }
}

// ---------------------------------------------------------------------------
// m(r, 1/f) via Jensen and the characteristic sample

/// `m(r,1/f)` and its ingredients. Jensen's formula gives
/// `m(r,1/f) = T(r,f) - N(r,1/f) - log|c_f|` where `c_f` is the first
/// nonzero Taylor coefficient of `f` at the origin.
#[derive(Debug, Clone, Copy)]
pub struct CharacteristicSample {
    pub r: f64,
    /// `T(r,f) = m(r,f)`.
    pub t: f64,
    pub m_inverse: f64,
    pub n_inverse: f64,
    /// `log|c_f|`.
    pub log_c: f64,
    pub quadrature_error: f64,
}

/// Computes `m(r,1/f)` from certified zero data; `zs` must be complete to
/// `r`. The origin multiplicity is read off `zs`.
pub fn proximity_inverse(f: &ExpPoly, r: f64, zs: &ZeroSet) -> Result<CharacteristicSample> {
    let t = proximity(f, r)?;
    let n_inverse = zs.integrated_count_to(r)?;
    let log_c = log_leading_taylor_coefficient(f, zs)?;
    Ok(CharacteristicSample {
        r,
        t: t.value,
        m_inverse: t.value - n_inverse - log_c,
        n_inverse,
        log_c,
        quadrature_error: t.error_estimate,
    })
}

/// `log|c_f|` with `c_f = f^{(λ)}(0)/λ!`, `λ` the multiplicity of the origin
/// as a zero of `f` (taken from the zero set's certificate).
fn log_leading_taylor_coefficient(f: &ExpPoly, zs: &ZeroSet) -> Result<f64> {
    let origin_mult: usize = zs
        .zeros
        .iter()
        .filter(|z| z.location.norm() <= 1e-9)
        .map(|z| z.multiplicity)
        .sum();
    let mut g = f.clone();
    let mut factorial = 1.0_f64;
    for k in 0..origin_mult {
        g = g.derivative();
        factorial *= (k + 1) as f64;
    }
    let value = eval_scaled(&g, Complex64::new(0.0, 0.0));
    let c = value.mantissa * value.log_offset.exp() / factorial;
    if c == Complex64::new(0.0, 0.0) {
        return Err(Error::EvaluationAtZero);
    }
    Ok(c.norm().ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expression;
    use crate::zeros::{locate_zeros, Region, Zero, ZeroSearchParams};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn sin_z() -> ExpPoly {
        parse_expression("(0-0.5*i)*exp(i*z)+(0.5*i)*exp(-i*z)").unwrap()
    }

    fn geometric_sum() -> ExpPoly {
        parse_expression("1+exp(z)+exp(2*z)").unwrap()
    }

    /// Oracle zero set for sin z: kπ with |kπ| ≤ rmax, certified by hand.
    fn sin_oracle_zeros(rmax: f64) -> ZeroSet {
        let mut zeros = vec![Zero {
            location: Complex64::new(0.0, 0.0),
            multiplicity: 1,
            residual: 0.0,
            tag: None,
        }];
        let mut k = 1.0;
        while k * PI <= rmax {
            for sign in [-1.0, 1.0] {
                zeros.push(Zero {
                    location: Complex64::new(sign * k * PI, 0.0),
                    multiplicity: 1,
                    residual: 0.0,
                    tag: None,
                });
            }
            k += 1.0;
        }
        ZeroSet {
            zeros,
            search_region: Region::disk(Complex64::new(0.0, 0.0), rmax + 0.5),
            complete: true,
            incomplete_boxes: vec![],
        }
    }

    /// Oracle zero set for 1 + e^z + e^{2z}: i(±2π/3 + 2πk).
    fn geometric_oracle_zeros(rmax: f64) -> ZeroSet {
        let mut zeros = Vec::new();
        for base in [2.0 * PI / 3.0, -2.0 * PI / 3.0] {
            let kmin = ((-rmax - base) / TAU).floor() as i64;
            let kmax = ((rmax - base) / TAU).ceil() as i64;
            for k in kmin..=kmax {
                let y = base + TAU * k as f64;
                if y.abs() <= rmax {
                    zeros.push(Zero {
                        location: Complex64::new(0.0, y),
                        multiplicity: 1,
                        residual: 0.0,
                        tag: None,
                    });
                }
            }
        }
        ZeroSet {
            zeros,
            search_region: Region::disk(Complex64::new(0.0, 0.0), rmax + 0.5),
            complete: true,
            incomplete_boxes: vec![],
        }
    }

    #[test]
    fn proximity_of_exp_is_r_over_pi() {
        // ∫ log⁺ e^{r cos θ} dθ / 2π = r/π
        let f = parse_expression("exp(z)").unwrap();
        let p = proximity(&f, 10.0).unwrap();
        assert_abs_diff_eq!(p.value, 10.0 / PI, epsilon = 1e-6);
        assert!(p.error_estimate < 1e-4);
    }

    #[test]
    fn proximity_of_constant() {
        let f = parse_expression("5").unwrap();
        for r in [1.0, 10.0, 80.0] {
            let p = proximity(&f, r).unwrap();
            assert_abs_diff_eq!(p.value, 5.0_f64.ln(), epsilon = 1e-10);
        }
    }

    #[test]
    fn proximity_of_sin_matches_highres_oracle() {
        // independent evaluation path: num_complex sin on a dense grid
        let r = 10.0;
        let oracle = {
            let g = |theta: f64| {
                Complex64::from_polar(r, theta).sin().norm().ln().max(0.0)
            };
            let n = 1 << 17;
            let mut sum = 0.0;
            let h = TAU / n as f64;
            for k in 0..n {
                let x = h * k as f64;
                sum += h / 6.0 * (g(x) + 4.0 * g(x + 0.5 * h) + g(x + h));
            }
            sum / TAU
        };
        let p = proximity(&sin_z(), r).unwrap();
        assert_abs_diff_eq!(p.value, oracle, epsilon = 1e-5);
        // asymptotically 2r/π - log 2
        assert!((p.value - (2.0 * r / PI - 2.0_f64.ln())).abs() < 0.3);
    }

    #[test]
    fn inverse_proximity_of_exp() {
        // no zeros, |c_f| = 1: m(r,1/e^z) = T(r,e^z) = r/π
        let f = parse_expression("exp(z)").unwrap();
        let zs = locate_zeros(
            &f,
            &Region::disk(Complex64::new(0.0, 0.0), 10.5),
            &ZeroSearchParams::default(),
        )
        .unwrap();
        let s = proximity_inverse(&f, 10.0, &zs).unwrap();
        assert_abs_diff_eq!(s.m_inverse, 10.0 / PI, epsilon = 1e-6);
        assert_abs_diff_eq!(s.n_inverse, 0.0);
        assert_abs_diff_eq!(s.log_c, 0.0);
    }

    #[test]
    fn inverse_proximity_of_constant() {
        let f = parse_expression("5").unwrap();
        let zs = ZeroSet {
            zeros: vec![],
            search_region: Region::disk(Complex64::new(0.0, 0.0), 100.0),
            complete: true,
            incomplete_boxes: vec![],
        };
        let s = proximity_inverse(&f, 10.0, &zs).unwrap();
        assert_abs_diff_eq!(s.m_inverse, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn inverse_proximity_of_geometric_sum_is_logarithmic() {
        // Q₀ ≡ 0 case: m(r,1/f) = O(log r) with a small constant
        let f = geometric_sum();
        let zs = geometric_oracle_zeros(21.0);
        let s = proximity_inverse(&f, 20.0, &zs).unwrap();
        assert!(s.m_inverse <= 2.0, "m(20, 1/f) = {}", s.m_inverse);
        assert!(s.m_inverse >= 0.0);
    }

    #[test]
    fn jensen_consistency_against_direct_quadrature() {
        // the identity m(r,1/f) = T - N - log|c_f| versus direct quadrature
        // of log⁺(1/|f|); radii keep the circle away from the zeros.
        let f = sin_z();
        let zs = sin_oracle_zeros(25.0);
        for r in [1.5, 4.5, 10.0] {
            let s = proximity_inverse(&f, r, &zs).unwrap();
            let direct = proximity_inverse_direct(&f, r).unwrap();
            assert!(
                (s.m_inverse - direct.value).abs() <= 1e-4,
                "r = {r}: jensen {} vs direct {}",
                s.m_inverse,
                direct.value
            );
        }
        let g = geometric_sum();
        let gzs = geometric_oracle_zeros(25.0);
        for r in [1.5, 5.0, 12.0] {
            let s = proximity_inverse(&g, r, &gzs).unwrap();
            let direct = proximity_inverse_direct(&g, r).unwrap();
            assert!(
                (s.m_inverse - direct.value).abs() <= 1e-4,
                "r = {r}: jensen {} vs direct {}",
                s.m_inverse,
                direct.value
            );
        }
    }

    #[test]
    fn origin_multiplicity_enters_log_c() {
        // sin z has a simple zero at 0 with c_f = 1
        let f = sin_z();
        let zs = sin_oracle_zeros(12.0);
        let s = proximity_inverse(&f, 10.0, &zs).unwrap();
        assert_abs_diff_eq!(s.log_c, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn halving_base_panels_stays_within_estimate() {
        let f = sin_z();
        let r = 10.0;
        let fine = proximity_with(&f, r, &ProximityOptions { base_panels: 8 }).unwrap();
        let coarse = proximity_with(&f, r, &ProximityOptions { base_panels: 4 }).unwrap();
        assert!(
            (fine.value - coarse.value).abs() <= fine.error_estimate + coarse.error_estimate,
            "difference {} vs estimates {} + {}",
            (fine.value - coarse.value).abs(),
            fine.error_estimate,
            coarse.error_estimate
        );
    }

    #[test]
    fn characteristic_scaling_trend() {
        // T(r)/r^q should approach C(co(W⁰))/2π = 2/π for sin z
        let f = sin_z();
        let mut prev_ratio = f64::NAN;
        for r in [10.0, 20.0, 40.0] {
            let p = proximity(&f, r).unwrap();
            let ratio = p.value / r;
            assert!(ratio < 1.0);
            if prev_ratio.is_finite() {
                assert!(
                    (ratio - 2.0 / PI).abs() <= (prev_ratio - 2.0 / PI).abs() + 1e-3,
                    "ratio did not trend toward 2/π"
                );
            }
            prev_ratio = ratio;
        }
    }
}
