//! Zero counting and localization by the argument principle.
//!
//! Winding numbers are computed by phase unwrapping along the region
//! boundary: the boundary is discretized until every step changes `arg f`
//! by less than π/2, the whole discretization is halved until the total
//! stabilizes, and the result must land within 1e-6 of an integer. That
//! integer certifies every count reported by this module.
//!
//! Localization subdivides (quadtree on rectangles, radial×angular
//! bisection on sectors), discards winding-0 boxes, sends winding-1 boxes
//! to a guarded Newton refinement driven by `f'/f`, and reports unresolved
//! winding-m clusters as one zero of multiplicity m once the box is below
//! the cluster tolerance.

use crate::error::{Error, Result};
use crate::evaluate::{eval_scaled, logderiv};
use crate::exppoly::ExpPoly;
use crate::geometry::{circular_distance, StripSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, TAU};

/// Scaled-|f| guard along boundaries, relative to the largest sample.
const BOUNDARY_GUARD_REL: f64 = 1e-8;
/// Multiplicative radius nudge when a zero sits on a boundary.
const PERTURB_FACTOR: f64 = 1.001;
const PERTURB_RETRIES: usize = 5;
/// Winding certificate: distance from the nearest integer.
const WINDING_INT_TOL: f64 = 1e-6;
/// Phase-total stability between two halvings, in radians.
const PHASE_STABLE_TOL: f64 = 1e-8 * TAU;

/// A search region. `StripSector` is the logarithmic-strip contour: two
/// edges `t·e^{i(θ* ± c·log t/t^p)}` joined by circular arcs at the inner
/// and outer radius.
#[derive(Debug, Clone)]
pub enum Region {
    Disk {
        center: Complex64,
        radius: f64,
    },
    AnnularSector {
        r_inner: f64,
        r_outer: f64,
        angle_lo: f64,
        angle_hi: f64,
    },
    StripSector {
        strip: StripSpec,
        r_inner: f64,
        r_outer: f64,
    },
    Rectangle {
        corner_lo: Complex64,
        corner_hi: Complex64,
    },
}

impl Region {
    pub fn disk(center: Complex64, radius: f64) -> Region {
        Region::Disk { center, radius }
    }

    pub fn rectangle(corner_lo: Complex64, corner_hi: Complex64) -> Region {
        Region::Rectangle {
            corner_lo,
            corner_hi,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Region::Disk { radius, .. } => *radius > 0.0,
            Region::AnnularSector {
                r_inner,
                r_outer,
                angle_lo,
                angle_hi,
            } => *r_inner > 0.0 && r_outer > r_inner && angle_hi > angle_lo && angle_hi - angle_lo <= TAU,
            Region::StripSector {
                r_inner, r_outer, ..
            } => *r_inner > 1.0 && r_outer > r_inner,
            Region::Rectangle {
                corner_lo,
                corner_hi,
            } => corner_hi.re > corner_lo.re && corner_hi.im > corner_lo.im,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("degenerate region {self:?}")))
        }
    }

    fn pieces(&self) -> Vec<Piece> {
        match self {
            Region::Disk { center, radius } => vec![Piece::Arc {
                center: *center,
                radius: *radius,
                a0: 0.0,
                a1: TAU,
            }],
            Region::AnnularSector {
                r_inner,
                r_outer,
                angle_lo,
                angle_hi,
            } => sector_pieces(*r_inner, *r_outer, *angle_lo, *angle_hi),
            Region::StripSector {
                strip,
                r_inner,
                r_outer,
            } => strip_pieces(strip, *r_inner, *r_outer),
            Region::Rectangle {
                corner_lo,
                corner_hi,
            } => rect_pieces(*corner_lo, *corner_hi),
        }
    }

    /// Grows the region slightly, keeping every previously-inside point.
    fn perturbed(&self) -> Region {
        match self {
            Region::Disk { center, radius } => Region::Disk {
                center: *center,
                radius: radius * PERTURB_FACTOR,
            },
            Region::AnnularSector {
                r_inner,
                r_outer,
                angle_lo,
                angle_hi,
            } => {
                let widen = 1e-3 * (angle_hi - angle_lo);
                Region::AnnularSector {
                    r_inner: r_inner / PERTURB_FACTOR,
                    r_outer: r_outer * PERTURB_FACTOR,
                    angle_lo: angle_lo - widen,
                    angle_hi: (angle_hi + widen).min(angle_lo - widen + TAU),
                }
            }
            Region::StripSector {
                strip,
                r_inner,
                r_outer,
            } => Region::StripSector {
                strip: strip.clone(),
                r_inner: (r_inner / PERTURB_FACTOR).max(1.0 + 1e-9),
                r_outer: r_outer * PERTURB_FACTOR,
            },
            Region::Rectangle {
                corner_lo,
                corner_hi,
            } => {
                let center = 0.5 * (corner_lo + corner_hi);
                Region::Rectangle {
                    corner_lo: center + (corner_lo - center) * PERTURB_FACTOR,
                    corner_hi: center + (corner_hi - center) * PERTURB_FACTOR,
                }
            }
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Region::Disk { center, radius } => (z - center).norm() <= *radius,
            Region::AnnularSector {
                r_inner,
                r_outer,
                angle_lo,
                angle_hi,
            } => {
                let r = z.norm();
                let rel = (z.arg() - angle_lo).rem_euclid(TAU);
                r >= *r_inner && r <= *r_outer && rel <= angle_hi - angle_lo
            }
            Region::StripSector {
                strip,
                r_inner,
                r_outer,
            } => {
                let r = z.norm();
                r >= *r_inner && r <= *r_outer && strip.contains(z)
            }
            Region::Rectangle {
                corner_lo,
                corner_hi,
            } => {
                z.re >= corner_lo.re
                    && z.re <= corner_hi.re
                    && z.im >= corner_lo.im
                    && z.im <= corner_hi.im
            }
        }
    }

    /// Largest `r` such that the origin-centered disk of radius `r` lies
    /// inside the region (0 when the origin is not covered). Counting
    /// functions are only certified up to this modulus.
    pub fn certified_modulus(&self) -> f64 {
        match self {
            Region::Disk { center, radius } => (radius - center.norm()).max(0.0),
            Region::Rectangle {
                corner_lo,
                corner_hi,
            } => {
                let m = (-corner_lo.re)
                    .min(-corner_lo.im)
                    .min(corner_hi.re)
                    .min(corner_hi.im);
                m.max(0.0)
            }
            _ => 0.0,
        }
    }
}

fn sector_pieces(r0: f64, r1: f64, a0: f64, a1: f64) -> Vec<Piece> {
    let origin = Complex64::new(0.0, 0.0);
    vec![
        Piece::Segment {
            a: Complex64::from_polar(r0, a0),
            b: Complex64::from_polar(r1, a0),
        },
        Piece::Arc {
            center: origin,
            radius: r1,
            a0,
            a1,
        },
        Piece::Segment {
            a: Complex64::from_polar(r1, a1),
            b: Complex64::from_polar(r0, a1),
        },
        Piece::Arc {
            center: origin,
            radius: r0,
            a0: a1,
            a1: a0,
        },
    ]
}

fn strip_pieces(strip: &StripSpec, r0: f64, r1: f64) -> Vec<Piece> {
    let origin = Complex64::new(0.0, 0.0);
    let theta = strip.ray.angle;
    let (w0, w1) = (strip.half_width(r0), strip.half_width(r1));
    vec![
        Piece::LogEdge {
            theta,
            c: strip.c,
            p: strip.p as i32,
            sign: -1.0,
            t0: r0,
            t1: r1,
        },
        Piece::Arc {
            center: origin,
            radius: r1,
            a0: theta - w1,
            a1: theta + w1,
        },
        Piece::LogEdge {
            theta,
            c: strip.c,
            p: strip.p as i32,
            sign: 1.0,
            t0: r1,
            t1: r0,
        },
        Piece::Arc {
            center: origin,
            radius: r0,
            a0: theta + w0,
            a1: theta - w0,
        },
    ]
}

fn rect_pieces(lo: Complex64, hi: Complex64) -> Vec<Piece> {
    let c = |re, im| Complex64::new(re, im);
    vec![
        Piece::Segment {
            a: c(lo.re, lo.im),
            b: c(hi.re, lo.im),
        },
        Piece::Segment {
            a: c(hi.re, lo.im),
            b: c(hi.re, hi.im),
        },
        Piece::Segment {
            a: c(hi.re, hi.im),
            b: c(lo.re, hi.im),
        },
        Piece::Segment {
            a: c(lo.re, hi.im),
            b: c(lo.re, lo.im),
        },
    ]
}

/// One parametric boundary piece, `s ∈ [0, 1]`.
#[derive(Debug, Clone)]
enum Piece {
    Segment {
        a: Complex64,
        b: Complex64,
    },
    Arc {
        center: Complex64,
        radius: f64,
        a0: f64,
        a1: f64,
    },
    /// `z(t) = t·e^{i(θ + sign·c·log t / t^p)}`, `t` linear from `t0` to `t1`.
    LogEdge {
        theta: f64,
        c: f64,
        p: i32,
        sign: f64,
        t0: f64,
        t1: f64,
    },
}

impl Piece {
    fn at(&self, s: f64) -> Complex64 {
        match *self {
            Piece::Segment { a, b } => a + (b - a) * s,
            Piece::Arc {
                center,
                radius,
                a0,
                a1,
            } => center + Complex64::from_polar(radius, a0 + (a1 - a0) * s),
            Piece::LogEdge {
                theta,
                c,
                p,
                sign,
                t0,
                t1,
            } => {
                let t = t0 + (t1 - t0) * s;
                Complex64::from_polar(t, theta + sign * c * t.ln() / t.powi(p))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Winding numbers

/// Winding number of `f` along the positively oriented boundary of `region`:
/// the number of zeros inside, by the argument principle.
///
/// Fails with [`Error::ZeroOnBoundary`] when the scaled |f| drops below the
/// guard at a boundary sample (callers perturb and retry) and with
/// [`Error::NonIntegerWinding`] when the phase total will not certify.
pub fn winding_count(f: &ExpPoly, region: &Region) -> Result<usize> {
    region.validate()?;
    winding_of_pieces(f, &region.pieces())
}

fn winding_of_pieces(f: &ExpPoly, pieces: &[Piece]) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroOnBoundary { scaled_modulus: 0.0 });
    }
    let mut counts: Vec<usize> = pieces.iter().map(|p| initial_samples(f, p)).collect();

    // Common relative scale for the boundary guard.
    let mut scale = 0.0_f64;
    for (piece, &n) in pieces.iter().zip(&counts) {
        for k in 0..=n {
            let v = eval_scaled(f, piece.at(k as f64 / n as f64)).mantissa.norm();
            if !v.is_finite() {
                return Err(Error::IncompleteSearch(
                    "non-finite boundary sample".into(),
                ));
            }
            scale = scale.max(v);
        }
    }
    if scale == 0.0 {
        return Err(Error::ZeroOnBoundary { scaled_modulus: 0.0 });
    }
    let guard = BOUNDARY_GUARD_REL * scale;

    let mut prev = phase_total(f, pieces, &counts, guard)?;
    for _ in 0..8 {
        for n in counts.iter_mut() {
            *n *= 2;
        }
        let cur = phase_total(f, pieces, &counts, guard)?;
        if (cur - prev).abs() <= PHASE_STABLE_TOL {
            let w = cur / TAU;
            let rounded = w.round();
            if (w - rounded).abs() > WINDING_INT_TOL || rounded < -0.5 {
                return Err(Error::NonIntegerWinding {
                    value: w,
                    tolerance: WINDING_INT_TOL,
                });
            }
            return Ok(rounded as usize);
        }
        prev = cur;
    }
    Err(Error::NonIntegerWinding {
        value: prev / TAU,
        tolerance: WINDING_INT_TOL,
    })
}

/// Rough bound on the phase change of `f` along the piece, to choose the
/// initial sample count. Correctness does not depend on it: the halving
/// certificate in `winding_of_pieces` is what validates the discretization.
fn initial_samples(f: &ExpPoly, piece: &Piece) -> usize {
    let mut est = 0.0;
    for k in 0..=4 {
        let s = k as f64 / 4.0;
        let z = piece.at(s);
        let h = 1e-5;
        let speed = (piece.at((s + h).min(1.0)) - piece.at((s - h).max(0.0))).norm()
            / ((s + h).min(1.0) - (s - h).max(0.0));
        let rate = f
            .terms()
            .iter()
            .map(|t| t.exponent().derivative().eval(z).norm())
            .fold(0.0, f64::max)
            + 4.0;
        est += 0.25 * rate * speed;
    }
    ((est / 0.7).ceil() as usize).clamp(16, 1 << 20)
}

fn phase_total(f: &ExpPoly, pieces: &[Piece], counts: &[usize], guard: f64) -> Result<f64> {
    let mut total = 0.0;
    for (piece, &n) in pieces.iter().zip(counts) {
        let mut s_prev = 0.0;
        let mut v_prev = boundary_sample(f, piece.at(0.0), guard)?;
        for k in 1..=n {
            let s = k as f64 / n as f64;
            let v = boundary_sample(f, piece.at(s), guard)?;
            total += phase_step(f, piece, s_prev, v_prev, s, v, guard, 0)?;
            s_prev = s;
            v_prev = v;
        }
    }
    Ok(total)
}

fn boundary_sample(f: &ExpPoly, z: Complex64, guard: f64) -> Result<Complex64> {
    let v = eval_scaled(f, z).mantissa;
    let m = v.norm();
    if !m.is_finite() {
        return Err(Error::IncompleteSearch("non-finite boundary sample".into()));
    }
    if m < guard {
        return Err(Error::ZeroOnBoundary { scaled_modulus: m });
    }
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn phase_step(
    f: &ExpPoly,
    piece: &Piece,
    s0: f64,
    v0: Complex64,
    s1: f64,
    v1: Complex64,
    guard: f64,
    depth: usize,
) -> Result<f64> {
    let d = (v1 / v0).arg();
    if d.abs() < FRAC_PI_2 {
        return Ok(d);
    }
    if depth >= 48 {
        return Err(Error::IncompleteSearch(format!(
            "phase refinement stalled on {piece:?} at s ∈ [{s0}, {s1}]"
        )));
    }
    let sm = 0.5 * (s0 + s1);
    let vm = boundary_sample(f, piece.at(sm), guard)?;
    Ok(phase_step(f, piece, s0, v0, sm, vm, guard, depth + 1)?
        + phase_step(f, piece, sm, vm, s1, v1, guard, depth + 1)?)
}

/// Winding with the standard perturbation policy: on a boundary hit the
/// region is grown by one part in 10³ and retried, at most five times.
/// Returns the count together with the region that was actually used.
fn winding_with_perturb(f: &ExpPoly, region: &Region) -> Result<(usize, Region)> {
    let mut current = region.clone();
    for attempt in 0..=PERTURB_RETRIES {
        match winding_count(f, &current) {
            Ok(n) => return Ok((n, current)),
            Err(Error::ZeroOnBoundary { .. }) if attempt < PERTURB_RETRIES => {
                current = current.perturbed();
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("loop returns or propagates");
}

// ---------------------------------------------------------------------------
// Located zeros

/// How a zero relates to a strip family (set by [`classify_by_strip`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroTag {
    /// Index into the strip list.
    Strip(usize),
    Outside,
    /// `|z| ≤ 1`: the strip definition starts at radius 1, so these are
    /// reported separately rather than as outside.
    SmallModulus,
}

#[derive(Debug, Clone)]
pub struct Zero {
    pub location: Complex64,
    pub multiplicity: usize,
    /// Scaled |f| at the reported location.
    pub residual: f64,
    pub tag: Option<ZeroTag>,
}

#[derive(Debug, Clone)]
pub struct ZeroSet {
    /// Sorted by modulus, then argument.
    pub zeros: Vec<Zero>,
    pub search_region: Region,
    /// Every box resolved and the multiplicities sum to the region's
    /// winding count.
    pub complete: bool,
    /// Diagnostics for boxes the subdivision gave up on.
    pub incomplete_boxes: Vec<String>,
}

impl ZeroSet {
    pub fn total_multiplicity(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    fn require_complete_to(&self, r: f64) -> Result<()> {
        let available = self.search_region.certified_modulus();
        if !self.complete || available + 1e-12 < r {
            return Err(Error::IncompleteZeroSet {
                requested: r,
                available,
            });
        }
        Ok(())
    }

    /// `n(r)`: zeros (with multiplicity) of modulus ≤ r. The set must be
    /// complete out to `r`.
    pub fn count_to(&self, r: f64) -> Result<usize> {
        self.require_complete_to(r)?;
        Ok(self
            .zeros
            .iter()
            .filter(|z| z.location.norm() <= r)
            .map(|z| z.multiplicity)
            .sum())
    }

    /// `N(r) = n(0)·log r + Σ_{0<|z_n|≤r} log(r/|z_n|)`, computed exactly
    /// from the zero list.
    pub fn integrated_count_to(&self, r: f64) -> Result<f64> {
        self.require_complete_to(r)?;
        let mut n = 0.0;
        for z in &self.zeros {
            let m = z.location.norm();
            if m <= 1e-12 {
                n += z.multiplicity as f64 * r.ln();
            } else if m <= r {
                n += z.multiplicity as f64 * (r / m).ln();
            }
        }
        Ok(n)
    }
}

/// Search tolerances and caps.
#[derive(Debug, Clone)]
pub struct ZeroSearchParams {
    /// Max scaled |f| at a reported zero.
    pub residual_tol: f64,
    /// Boxes below this diameter report their winding as one multiple zero.
    pub cluster_tol: f64,
    pub max_depth: usize,
    pub newton_max_iter: usize,
}

impl Default for ZeroSearchParams {
    fn default() -> Self {
        ZeroSearchParams {
            residual_tol: 1e-9,
            cluster_tol: 1e-8,
            max_depth: 64,
            newton_max_iter: 60,
        }
    }
}

/// Locates all zeros of `f` in `region`. The total multiplicity of the
/// result equals the region's winding count whenever `complete` is true.
pub fn locate_zeros(f: &ExpPoly, region: &Region, params: &ZeroSearchParams) -> Result<ZeroSet> {
    region.validate()?;
    let (count, effective) = winding_with_perturb(f, region)?;

    // Localization always runs over a rectangle or sector cover; counts are
    // certified against the region's own contour.
    let (cover, filter): (SearchBox, Box<dyn Fn(Complex64) -> bool>) = match &effective {
        Region::Rectangle {
            corner_lo,
            corner_hi,
        } => (
            SearchBox::Rect {
                lo: *corner_lo,
                hi: *corner_hi,
            },
            Box::new(|_| true),
        ),
        Region::Disk { center, radius } => {
            let half = Complex64::new(*radius, *radius);
            let (c, r) = (*center, *radius);
            (
                SearchBox::Rect {
                    lo: center - half,
                    hi: center + half,
                },
                Box::new(move |z: Complex64| (z - c).norm() <= r),
            )
        }
        Region::AnnularSector {
            r_inner,
            r_outer,
            angle_lo,
            angle_hi,
        } => (
            SearchBox::Sector {
                r0: *r_inner,
                r1: *r_outer,
                a0: *angle_lo,
                a1: *angle_hi,
            },
            Box::new(|_| true),
        ),
        Region::StripSector {
            strip,
            r_inner,
            r_outer,
        } => {
            // Enclose the strip sector in an annular sector; the max of the
            // half-width over [r_inner, r_outer] is at an endpoint or at
            // t = e^{1/p}.
            let mut w = strip.half_width(*r_inner).max(strip.half_width(*r_outer));
            let t_peak = (1.0 / strip.p as f64).exp();
            if t_peak > *r_inner && t_peak < *r_outer {
                w = w.max(strip.half_width(t_peak));
            }
            let w = (w * 1.05).min(std::f64::consts::PI);
            let s = strip.clone();
            let (ri, ro) = (*r_inner, *r_outer);
            (
                SearchBox::Sector {
                    r0: r_inner / PERTURB_FACTOR,
                    r1: r_outer * PERTURB_FACTOR,
                    a0: strip.ray.angle - w,
                    a1: strip.ray.angle + w,
                },
                Box::new(move |z: Complex64| {
                    let r = z.norm();
                    r >= ri && r <= ro && s.contains(z)
                }),
            )
        }
    };

    let mut out = SearchOut::default();
    if count > 0 {
        // Rectangles and sectors are their own cover; disks and strip
        // sectors need the cover's winding separately.
        let (cover_count, cover_box) = match &effective {
            Region::Rectangle { .. } | Region::AnnularSector { .. } => (count, cover),
            _ => cover_winding(f, cover)?,
        };
        out = subdivide(f, &cover_box, cover_count, params, 0)?;
    }

    let mut zeros: Vec<Zero> = out.zeros.into_iter().filter(|z| filter(z.location)).collect();
    zeros.sort_by(|a, b| {
        (a.location.norm(), a.location.arg())
            .partial_cmp(&(b.location.norm(), b.location.arg()))
            .expect("finite locations")
    });

    let located: usize = zeros.iter().map(|z| z.multiplicity).sum();
    let mut incomplete_boxes = out.incomplete;
    if incomplete_boxes.is_empty() && located != count {
        incomplete_boxes.push(format!(
            "located {located} zeros, the region contour certifies {count}"
        ));
    }
    let complete = incomplete_boxes.is_empty();
    Ok(ZeroSet {
        zeros,
        search_region: effective,
        complete,
        incomplete_boxes,
    })
}

/// Winding of the cover box, with cut-style nudges: the cover is ours to
/// choose, so on a boundary hit we grow it slightly.
fn cover_winding(f: &ExpPoly, cover: SearchBox) -> Result<(usize, SearchBox)> {
    let mut bx = cover;
    for attempt in 0..=PERTURB_RETRIES {
        match winding_of_pieces(f, &bx.pieces()) {
            Ok(n) => return Ok((n, bx)),
            Err(Error::ZeroOnBoundary { .. }) if attempt < PERTURB_RETRIES => {
                bx = bx.grown(PERTURB_FACTOR);
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("loop returns or propagates");
}

#[derive(Debug, Clone)]
enum SearchBox {
    Rect { lo: Complex64, hi: Complex64 },
    Sector { r0: f64, r1: f64, a0: f64, a1: f64 },
}

impl SearchBox {
    fn pieces(&self) -> Vec<Piece> {
        match self {
            SearchBox::Rect { lo, hi } => rect_pieces(*lo, *hi),
            SearchBox::Sector { r0, r1, a0, a1 } => sector_pieces(*r0, *r1, *a0, *a1),
        }
    }

    fn center(&self) -> Complex64 {
        match self {
            SearchBox::Rect { lo, hi } => 0.5 * (lo + hi),
            SearchBox::Sector { r0, r1, a0, a1 } => {
                Complex64::from_polar(0.5 * (r0 + r1), 0.5 * (a0 + a1))
            }
        }
    }

    fn diameter(&self) -> f64 {
        match self {
            SearchBox::Rect { lo, hi } => (hi - lo).norm(),
            SearchBox::Sector { r0, r1, a0, a1 } => {
                let radial = r1 - r0;
                let arc = r1 * (a1 - a0);
                (radial * radial + arc * arc).sqrt()
            }
        }
    }

    fn contains(&self, z: Complex64) -> bool {
        match self {
            SearchBox::Rect { lo, hi } => {
                z.re >= lo.re && z.re <= hi.re && z.im >= lo.im && z.im <= hi.im
            }
            SearchBox::Sector { r0, r1, a0, a1 } => {
                let r = z.norm();
                let rel = (z.arg() - a0).rem_euclid(TAU);
                r >= *r0 && r <= *r1 && rel <= a1 - a0
            }
        }
    }

    fn grown(&self, factor: f64) -> SearchBox {
        match self {
            SearchBox::Rect { lo, hi } => {
                let c = 0.5 * (lo + hi);
                SearchBox::Rect {
                    lo: c + (lo - c) * factor,
                    hi: c + (hi - c) * factor,
                }
            }
            SearchBox::Sector { r0, r1, a0, a1 } => {
                let widen = (factor - 1.0) * (a1 - a0);
                SearchBox::Sector {
                    r0: r0 / factor,
                    r1: r1 * factor,
                    a0: a0 - widen,
                    a1: a1 + widen,
                }
            }
        }
    }

    /// Four children; the cut position shifts with the attempt index so a
    /// zero sitting on a cut can be dodged.
    fn split(&self, attempt: usize) -> Vec<SearchBox> {
        let shift = attempt as f64 * 1e-3;
        match self {
            SearchBox::Rect { lo, hi } => {
                let cx = 0.5 * (lo.re + hi.re) + shift * (hi.re - lo.re);
                let cy = 0.5 * (lo.im + hi.im) + shift * (hi.im - lo.im);
                let c = |re, im| Complex64::new(re, im);
                vec![
                    SearchBox::Rect {
                        lo: *lo,
                        hi: c(cx, cy),
                    },
                    SearchBox::Rect {
                        lo: c(cx, lo.im),
                        hi: c(hi.re, cy),
                    },
                    SearchBox::Rect {
                        lo: c(lo.re, cy),
                        hi: c(cx, hi.im),
                    },
                    SearchBox::Rect {
                        lo: c(cx, cy),
                        hi: *hi,
                    },
                ]
            }
            SearchBox::Sector { r0, r1, a0, a1 } => {
                let rm = 0.5 * (r0 + r1) + shift * (r1 - r0);
                let am = 0.5 * (a0 + a1) + shift * (a1 - a0);
                vec![
                    SearchBox::Sector {
                        r0: *r0,
                        r1: rm,
                        a0: *a0,
                        a1: am,
                    },
                    SearchBox::Sector {
                        r0: *r0,
                        r1: rm,
                        a0: am,
                        a1: *a1,
                    },
                    SearchBox::Sector {
                        r0: rm,
                        r1: *r1,
                        a0: *a0,
                        a1: am,
                    },
                    SearchBox::Sector {
                        r0: rm,
                        r1: *r1,
                        a0: am,
                        a1: *a1,
                    },
                ]
            }
        }
    }
}

#[derive(Debug, Default)]
struct SearchOut {
    zeros: Vec<Zero>,
    incomplete: Vec<String>,
}

impl SearchOut {
    fn merge(mut self, other: SearchOut) -> SearchOut {
        self.zeros.extend(other.zeros);
        self.incomplete.extend(other.incomplete);
        self
    }
}

fn subdivide(
    f: &ExpPoly,
    bx: &SearchBox,
    count: usize,
    params: &ZeroSearchParams,
    depth: usize,
) -> Result<SearchOut> {
    if count == 0 {
        return Ok(SearchOut::default());
    }
    if count == 1 {
        if let Some(zero) = try_newton(f, bx, params) {
            return Ok(SearchOut {
                zeros: vec![zero],
                incomplete: vec![],
            });
        }
    }
    if bx.diameter() < params.cluster_tol {
        return Ok(SearchOut {
            zeros: vec![polish_cluster(f, bx, count, params)],
            incomplete: vec![],
        });
    }
    if depth >= params.max_depth {
        return Ok(SearchOut {
            zeros: vec![],
            incomplete: vec![format!("{bx:?} with winding {count}")],
        });
    }

    'attempt: for attempt in 0..=PERTURB_RETRIES {
        let children = bx.split(attempt);
        let mut counted = Vec::with_capacity(children.len());
        for child in &children {
            match winding_of_pieces(f, &child.pieces()) {
                Ok(n) => counted.push(n),
                Err(Error::ZeroOnBoundary { .. }) if attempt < PERTURB_RETRIES => {
                    continue 'attempt;
                }
                Err(e) => return Err(e),
            }
        }
        let total: usize = counted.iter().sum();
        if total != count {
            // A zero slipped through a cut below the guard; move the cut.
            if attempt < PERTURB_RETRIES {
                continue 'attempt;
            }
            return Err(Error::IncompleteSearch(format!(
                "children of {bx:?} count {total}, parent counted {count}"
            )));
        }

        let work: Vec<(SearchBox, usize)> = children
            .into_iter()
            .zip(counted)
            .filter(|(_, n)| *n > 0)
            .collect();
        let results: Vec<Result<SearchOut>> = if depth <= 5 && work.len() > 1 {
            work.par_iter()
                .map(|(child, n)| subdivide(f, child, *n, params, depth + 1))
                .collect()
        } else {
            work.iter()
                .map(|(child, n)| subdivide(f, child, *n, params, depth + 1))
                .collect()
        };
        let mut out = SearchOut::default();
        for r in results {
            out = out.merge(r?);
        }
        return Ok(out);
    }
    Err(Error::IncompleteSearch(format!(
        "could not split {bx:?} away from its zeros"
    )))
}

/// Newton iteration `z ← z - f/f'` from the box center. Succeeds only when
/// the iterate stays near the box, converges, lands strictly inside and
/// meets the residual tolerance; any other outcome falls back to bisection.
fn try_newton(f: &ExpPoly, bx: &SearchBox, params: &ZeroSearchParams) -> Option<Zero> {
    let mut z = bx.center();
    let leash = 2.0 * bx.diameter();
    let center = bx.center();
    for _ in 0..params.newton_max_iter {
        match logderiv(f, z) {
            Err(_) => break, // landed exactly on a zero
            Ok(ld) => {
                let step = ld.inv();
                let next = z - step;
                if (next - center).norm() > leash {
                    return None;
                }
                z = next;
                if step.norm() <= 1e-14 * (1.0 + z.norm()) {
                    break;
                }
            }
        }
    }
    let residual = eval_scaled(f, z).mantissa.norm();
    if residual <= params.residual_tol && bx.contains(z) {
        Some(Zero {
            location: z,
            multiplicity: 1,
            residual,
            tag: None,
        })
    } else {
        None
    }
}

/// Multiplicity-aware polish for a cluster box: `z ← z - m/(f'/f)` converges
/// quadratically on an m-fold zero.
fn polish_cluster(f: &ExpPoly, bx: &SearchBox, mult: usize, params: &ZeroSearchParams) -> Zero {
    let mut z = bx.center();
    let center = bx.center();
    let leash = 4.0 * bx.diameter().max(params.cluster_tol);
    for _ in 0..params.newton_max_iter {
        match logderiv(f, z) {
            Err(_) => break,
            Ok(ld) => {
                let step = mult as f64 / ld;
                let next = z - step;
                if (next - center).norm() > leash {
                    break;
                }
                z = next;
                if step.norm() <= 1e-14 * (1.0 + z.norm()) {
                    break;
                }
            }
        }
    }
    Zero {
        location: z,
        multiplicity: mult,
        residual: eval_scaled(f, z).mantissa.norm(),
        tag: None,
    }
}

// ---------------------------------------------------------------------------
// Strip classification

#[derive(Debug, Clone)]
pub struct StripClassification {
    /// The input zeros with their tags filled in, same order.
    pub tagged: ZeroSet,
    /// Zero indices per strip (parallel to the strip list).
    pub per_strip: Vec<Vec<usize>>,
    pub outside: Vec<usize>,
    pub small_modulus: Vec<usize>,
    /// Indices of zeros within 1e-9 of a strip edge (counted inside).
    pub boundary_flagged: Vec<usize>,
}

impl StripClassification {
    /// `n(r, Λ)` for strip `i` from the tagged zeros.
    pub fn strip_count_to(&self, i: usize, r: f64) -> usize {
        self.per_strip[i]
            .iter()
            .map(|&k| &self.tagged.zeros[k])
            .filter(|z| z.location.norm() <= r)
            .map(|z| z.multiplicity)
            .sum()
    }

    pub fn outside_count_to(&self, r: f64) -> usize {
        self.outside
            .iter()
            .map(|&k| &self.tagged.zeros[k])
            .filter(|z| z.location.norm() <= r)
            .map(|z| z.multiplicity)
            .sum()
    }
}

const STRIP_EDGE_FLAG_TOL: f64 = 1e-9;

/// Tags every zero with its strip (nearest containing ray), `Outside`, or
/// `SmallModulus` for `|z| ≤ 1` where the strip definition does not reach.
///
/// Errors when a strip covers the whole circle at the outermost searched
/// radius (the family cannot separate anything there: `c` is too large for
/// the radius range) or when a zero is equidistant between two containing
/// strips.
pub fn classify_by_strip(zs: &ZeroSet, strips: &[StripSpec]) -> Result<StripClassification> {
    let rmax = match &zs.search_region {
        Region::Disk { center, radius } => center.norm() + radius,
        Region::Rectangle {
            corner_lo,
            corner_hi,
        } => corner_lo.norm().max(corner_hi.norm()),
        Region::AnnularSector { r_outer, .. } | Region::StripSector { r_outer, .. } => *r_outer,
    };
    for (i, s) in strips.iter().enumerate() {
        if rmax > 1.0 && s.half_width(rmax) >= std::f64::consts::PI {
            return Err(Error::OverlappingStrips(format!(
                "strip {i} (θ* = {:.6}) covers every direction at r = {rmax}: half-width {:.3} ≥ π",
                s.ray.angle,
                s.half_width(rmax)
            )));
        }
        for (j, other) in strips.iter().enumerate().skip(i + 1) {
            if circular_distance(s.ray.angle, other.ray.angle) < 1e-9 {
                return Err(Error::OverlappingStrips(format!(
                    "strips {i} and {j} share the ray θ* = {:.6}",
                    s.ray.angle
                )));
            }
        }
    }

    let mut tagged = zs.clone();
    let mut per_strip = vec![Vec::new(); strips.len()];
    let mut outside = Vec::new();
    let mut small_modulus = Vec::new();
    let mut boundary_flagged = Vec::new();

    for (k, zero) in zs.zeros.iter().enumerate() {
        let z = zero.location;
        if z.norm() <= 1.0 {
            tagged.zeros[k].tag = Some(ZeroTag::SmallModulus);
            small_modulus.push(k);
            continue;
        }
        // Closed-strip convention: a zero within 1e-9 of the edge counts
        // inside, flagged for auditability. Zeros inside several strips
        // (the strips may overlap at small radii) go to the nearest ray.
        let mut containing: Vec<(usize, f64, f64)> = strips
            .iter()
            .enumerate()
            .filter_map(|(i, s)| {
                let slack = s.boundary_distance(z);
                (slack <= STRIP_EDGE_FLAG_TOL).then(|| {
                    (i, circular_distance(z.arg(), s.ray.angle), slack)
                })
            })
            .collect();
        containing.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite distances"));
        if containing.len() >= 2 && (containing[1].1 - containing[0].1).abs() <= 1e-9 {
            return Err(Error::OverlappingStrips(format!(
                "zero at {z} is equidistant between strips {} and {}",
                containing[0].0, containing[1].0
            )));
        }
        match containing.first() {
            Some(&(i, _, slack)) => {
                tagged.zeros[k].tag = Some(ZeroTag::Strip(i));
                per_strip[i].push(k);
                if slack.abs() <= STRIP_EDGE_FLAG_TOL {
                    boundary_flagged.push(k);
                }
            }
            None => {
                tagged.zeros[k].tag = Some(ZeroTag::Outside);
                outside.push(k);
            }
        }
    }

    Ok(StripClassification {
        tagged,
        per_strip,
        outside,
        small_modulus,
        boundary_flagged,
    })
}
