//! Convex-hull geometry of the conjugated leading coefficients and
//! everything it predicts: support/indicator functions, critical rays and
//! logarithmic strips.
//!
//! All hull input points are the *conjugates* `w̄_j`; conjugating is the
//! caller's responsibility (see [`NormalizedForm::conjugated_leadings`]).
//! A degenerate collinear hull counts as two sides with opposite outer
//! normals, so its perimeter is twice the segment length; that convention
//! is what makes the per-side zero counts sum to the hull circumference.

use crate::error::{Error, Result};
use crate::exppoly::NormalizedForm;
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Absolute tolerance for cusp equality checks.
const CUSP_TOL: f64 = 1e-12;

/// Convex hull of a finite point set with side normals and perimeter.
#[derive(Debug, Clone)]
pub struct HullGeometry {
    /// The points the hull was built from (already conjugated by the caller).
    pub input_points: Vec<Complex64>,
    /// Hull vertices in counterclockwise order, no three consecutive
    /// collinear. A single point has one vertex; a collinear set has two.
    pub vertices: Vec<Complex64>,
    pub sides: Vec<HullSide>,
    pub perimeter: f64,
}

#[derive(Debug, Clone)]
pub struct HullSide {
    pub start: Complex64,
    pub end: Complex64,
    /// Argument of the outward normal, in `[0, 2π)`. For a counterclockwise
    /// side this is `arg(end - start) - π/2`.
    pub normal_angle: f64,
}

impl HullSide {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }
}

/// A cusp direction of the indicator, together with the hull side and
/// branch that generated it: `θ* = (θ⊥ + 2πn)/q mod 2π`.
#[derive(Debug, Clone)]
pub struct CriticalRay {
    /// The critical angle `θ*` in `[0, 2π)`.
    pub angle: f64,
    /// Index into [`HullGeometry::sides`] of the generating side.
    pub side_index: usize,
    /// The (un-conjugated) leading coefficients at the side's endpoints.
    pub leading_pair: (Complex64, Complex64),
    /// `|w_j - w_k|`, the side length and the per-strip count coefficient.
    pub side_length: f64,
    /// Which of the `q` roots of the normal direction this is.
    pub branch: usize,
}

/// A logarithmic strip `{ re^{iθ} : r > 1, |θ - θ*| < c·log r / r^p }`.
#[derive(Debug, Clone)]
pub struct StripSpec {
    pub ray: CriticalRay,
    pub c: f64,
    pub p: usize,
}

impl StripSpec {
    /// Angular half-width of the strip at radius `r` (meaningful for `r > 1`).
    pub fn half_width(&self, r: f64) -> f64 {
        self.c * r.ln() / r.powi(self.p as i32)
    }

    /// Membership test: `|z| > 1` and the circular distance from `arg z` to
    /// `θ*` is below the half-width.
    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        if r <= 1.0 {
            return false;
        }
        circular_distance(z.arg(), self.ray.angle) < self.half_width(r)
    }

    /// Signed slack of the membership inequality: negative inside.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        circular_distance(z.arg(), self.ray.angle) - self.half_width(z.norm())
    }
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r == TAU {
        0.0
    } else {
        r
    }
}

/// Andrew's monotone chain over the given points (callers pass the
/// conjugated leading coefficients). Degenerate sets follow the conventions
/// on [`HullGeometry`].
pub fn convex_hull(points: &[Complex64]) -> Result<HullGeometry> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut sorted: Vec<Complex64> = points.to_vec();
    sorted.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite"));
    sorted.dedup();

    let cross = |o: Complex64, a: Complex64, b: Complex64| -> f64 {
        (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
    };

    let mut lower: Vec<Complex64> = Vec::new();
    for &p in &sorted {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Complex64> = Vec::new();
    for &p in sorted.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    let mut vertices = lower;
    vertices.append(&mut upper);

    // Collinear input collapses both chains to the two extreme points;
    // a single distinct point collapses further.
    if vertices.is_empty() {
        vertices = vec![sorted[0]];
        if sorted.len() > 1 {
            vertices.push(*sorted.last().expect("nonempty"));
        }
        vertices.dedup();
    }

    let sides = make_sides(&vertices);
    let perimeter = sides.iter().map(HullSide::length).sum();
    Ok(HullGeometry {
        input_points: points.to_vec(),
        vertices,
        sides,
        perimeter,
    })
}

fn make_sides(vertices: &[Complex64]) -> Vec<HullSide> {
    match vertices {
        [] | [_] => Vec::new(),
        [a, b] => {
            // Segment traversed both ways, opposite normals.
            vec![side(*a, *b), side(*b, *a)]
        }
        _ => (0..vertices.len())
            .map(|k| side(vertices[k], vertices[(k + 1) % vertices.len()]))
            .collect(),
    }
}

fn side(start: Complex64, end: Complex64) -> HullSide {
    let normal_angle = normalize_angle((end - start).arg() - PI / 2.0);
    HullSide {
        start,
        end,
        normal_angle,
    }
}

impl HullGeometry {
    /// Support function `k(φ) = max over input points w̄ of ⟨w̄, e^{iφ}⟩`
    /// (equivalently `max_j Re(w_j e^{iφ})` over the originals). Maximizing
    /// over hull vertices suffices.
    pub fn support(&self, phi: f64) -> f64 {
        let (c, s) = (phi.cos(), phi.sin());
        self.vertices
            .iter()
            .map(|v| v.re * c + v.im * s)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Perimeter by Cauchy's formula `∫₀^{2π} k(φ) dφ`, integrated with
    /// adaptive Simpson panels split at the side normal angles where the
    /// support function has kinks. Agrees with [`HullGeometry::perimeter`].
    pub fn perimeter_by_support_integral(&self) -> f64 {
        let mut breaks: Vec<f64> = self.sides.iter().map(|s| s.normal_angle).collect();
        breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
        breaks.dedup();
        if breaks.is_empty() {
            breaks.push(0.0);
        }
        let first = breaks[0];
        breaks.push(first + TAU);

        let mut total = 0.0;
        for pair in breaks.windows(2) {
            total += adaptive_simpson(
                &|phi| self.support(phi),
                pair[0],
                pair[1],
                1e-13,
                40,
            );
        }
        total
    }
}

/// Plain adaptive Simpson with interval-halving error control.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() < 15.0 * tol {
        left + right + diff / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Indicator value `h_f(θ) = max_j Re(w_j e^{iqθ})` with the attaining entry.
#[derive(Debug, Clone, Copy)]
pub struct Indicator {
    pub value: f64,
    /// Index into `nf.entries` of the attaining leading coefficient
    /// (smallest index on ties).
    pub argmax_index: usize,
    /// Two entries tie within 1e-12: `θ` is (numerically) a cusp.
    pub tie: bool,
}

/// Evaluates the indicator of `nf` at azimuth `θ`.
pub fn indicator(nf: &NormalizedForm, theta: f64) -> Indicator {
    let rot = Complex64::from_polar(1.0, nf.order as f64 * theta);
    let mut best = f64::NEG_INFINITY;
    let mut argmax_index = 0;
    for (j, entry) in nf.entries.iter().enumerate() {
        let v = (entry.leading * rot).re;
        if v > best {
            best = v;
            argmax_index = j;
        }
    }
    let tie = nf
        .entries
        .iter()
        .enumerate()
        .any(|(j, e)| j != argmax_index && (best - (e.leading * rot).re).abs() <= CUSP_TOL);
    Indicator {
        value: best,
        argmax_index,
        tie,
    }
}

/// All critical rays `θ* = (θ⊥ + 2πn)/q`, `n = 0..q-1`, over the hull sides
/// of the conjugated leading coefficients, sorted by angle. Empty when the
/// hull is a single point (no sides, no rays).
///
/// Every returned angle is verified to satisfy the cusp equality
/// `Re(w_j e^{iqθ*}) = Re(w_k e^{iqθ*})` within 1e-12.
pub fn critical_rays(nf: &NormalizedForm) -> Result<Vec<CriticalRay>> {
    let hull = convex_hull(&nf.conjugated_leadings())?;
    let q = nf.order;
    let mut rays = Vec::with_capacity(hull.sides.len() * q);
    for (side_index, side) in hull.sides.iter().enumerate() {
        let pair = (side.start.conj(), side.end.conj());
        let side_length = side.length();
        for branch in 0..q {
            let angle = normalize_angle((side.normal_angle + TAU * branch as f64) / q as f64);
            let rot = Complex64::from_polar(1.0, q as f64 * angle);
            let gap = ((pair.0 * rot).re - (pair.1 * rot).re).abs();
            if gap > CUSP_TOL {
                return Err(Error::Config(format!(
                    "critical ray at {angle} fails the cusp equality (gap {gap:.3e})"
                )));
            }
            rays.push(CriticalRay {
                angle,
                side_index,
                leading_pair: pair,
                side_length,
                branch,
            });
        }
    }
    rays.sort_by(|a, b| a.angle.partial_cmp(&b.angle).expect("finite angles"));
    Ok(rays)
}

/// The cusp separation constant: `2a = min |ψ_k'(θ) - ψ_j'(θ)|` over angles
/// where `ψ_k(θ) = ψ_j(θ)`, with `ψ_k(θ) = Re(w_k e^{iqθ})`. The returned
/// default is `c = κ/a`; `κ` is a safety multiplier (the growth constant the
/// theory would divide out is not computable from the symbol data alone).
pub fn default_c(nf: &NormalizedForm, kappa: f64) -> Result<f64> {
    let q = nf.order as f64;
    let ws = nf.leadings();
    let mut two_a = f64::INFINITY;
    for j in 0..ws.len() {
        for k in (j + 1)..ws.len() {
            let delta = ws[k] - ws[j];
            if delta == Complex64::new(0.0, 0.0) {
                continue;
            }
            // ψ_k - ψ_j = Re(Δw e^{iqθ}) = |Δw| cos(qθ + arg Δw); its zeros
            // are qθ + arg Δw = π/2 + πn, and there the θ-derivative has
            // magnitude q|Δw| exactly. Evaluate at each crossing anyway and
            // take the observed minimum.
            for n in 0..(2 * nf.order) {
                let theta = (PI / 2.0 + PI * n as f64 - delta.arg()) / q;
                let rot = Complex64::from_polar(1.0, q * theta);
                // ψ'(θ) = -q·Im(w e^{iqθ})
                let dk = -q * (ws[k] * rot).im;
                let dj = -q * (ws[j] * rot).im;
                two_a = two_a.min((dk - dj).abs());
            }
        }
    }
    if !two_a.is_finite() {
        return Err(Error::Config(
            "no crossing pairs: need at least two distinct leading coefficients".into(),
        ));
    }
    let a = two_a / 2.0;
    if a <= 0.0 {
        return Err(Error::DegenerateCusp);
    }
    Ok(kappa / a)
}

/// Builds the strip family for `nf`: one strip per critical ray, shared `c`
/// (default `default_c(nf, κ)`) and `p = nf.gap` unless overridden.
pub fn strips_for(
    nf: &NormalizedForm,
    c_override: Option<f64>,
    kappa: f64,
    p_override: Option<usize>,
) -> Result<Vec<StripSpec>> {
    let rays = critical_rays(nf)?;
    if rays.is_empty() {
        return Ok(Vec::new());
    }
    let c = match c_override {
        Some(c) if c > 0.0 => c,
        Some(c) => return Err(Error::Config(format!("strip constant c must be positive, got {c}"))),
        None => default_c(nf, kappa)?,
    };
    let p = p_override.unwrap_or(nf.gap);
    if p < 1 || p > nf.order {
        return Err(Error::Config(format!(
            "strip exponent p = {p} outside 1..={}",
            nf.order
        )));
    }
    Ok(rays
        .into_iter()
        .map(|ray| StripSpec { ray, c, p })
        .collect())
}
