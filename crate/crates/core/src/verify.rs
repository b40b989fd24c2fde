//! Predicted-vs-empirical reports for the asymptotic laws: per-strip and
//! total zero counts, the integrated counting function and the
//! characteristic, all with leading term `coefficient · r^q`.
//!
//! Every law's error term scales like `r^{q-p}` times a logarithmic factor;
//! report rows carry the residual divided by that modulus so divergence is
//! visible at a glance.

use crate::error::Result;
use crate::exppoly::{ExpPoly, NormalizedForm};
use crate::geometry::{convex_hull, critical_rays, StripSpec};
use crate::nevanlinna::proximity;
use crate::zeros::{classify_by_strip, ZeroSet};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictionKind {
    TotalZeroCount,
    StripZeroCount { strip_index: usize, ray_angle: f64 },
    IntegratedN,
    Characteristic,
    OutsideStripBound,
}

/// One asymptotic law: leading term `coefficient · r^order` with error
/// `O(r^error_exponent · log^error_log_power r)` (the outside-strip bound
/// and the N/T laws use `r^{q-p} + log r`, reported with log power 1).
#[derive(Debug, Clone, Serialize)]
pub struct Prediction {
    #[serde(flatten)]
    pub kind: PredictionKind,
    pub coefficient: f64,
    pub order: usize,
    pub error_exponent: usize,
    pub error_log_power: f64,
}

impl Prediction {
    pub fn leading_term(&self, r: f64) -> f64 {
        self.coefficient * r.powi(self.order as i32)
    }
}

/// All predictions derivable from the symbol data: one per strip, plus the
/// total count, the integrated count, the characteristic, and the
/// outside-strip bound. `W⁰ = W ∪ {0}` drives the characteristic; `W`
/// drives the zero counts.
pub fn predict_all(nf: &NormalizedForm, epsilon: f64) -> Result<Vec<Prediction>> {
    let q = nf.order;
    let gap = nf.gap;
    let hull = convex_hull(&nf.conjugated_leadings())?;
    let mut with_origin = nf.conjugated_leadings();
    with_origin.push(Complex64::new(0.0, 0.0));
    let hull0 = convex_hull(&with_origin)?;
    let rays = critical_rays(nf)?;

    let mut out = Vec::with_capacity(rays.len() + 4);
    for (i, ray) in rays.iter().enumerate() {
        out.push(Prediction {
            kind: PredictionKind::StripZeroCount {
                strip_index: i,
                ray_angle: ray.angle,
            },
            coefficient: ray.side_length / TAU,
            order: q,
            error_exponent: q - gap,
            error_log_power: 3.0 + epsilon,
        });
    }
    out.push(Prediction {
        kind: PredictionKind::TotalZeroCount,
        coefficient: q as f64 * hull.perimeter / TAU,
        order: q,
        error_exponent: q - gap,
        error_log_power: 3.0 + epsilon,
    });
    out.push(Prediction {
        kind: PredictionKind::IntegratedN,
        coefficient: hull.perimeter / TAU,
        order: q,
        error_exponent: q - gap,
        error_log_power: 1.0,
    });
    out.push(Prediction {
        kind: PredictionKind::Characteristic,
        coefficient: hull0.perimeter / TAU,
        order: q,
        error_exponent: q - gap,
        error_log_power: 1.0,
    });
    out.push(Prediction {
        kind: PredictionKind::OutsideStripBound,
        coefficient: 0.0,
        order: q,
        error_exponent: q - gap,
        error_log_power: 1.0,
    });
    Ok(out)
}

/// Geometric radius grid with ratio √2 ending at `rmax`.
pub fn default_radius_grid(rmax: f64, points: usize) -> Vec<f64> {
    let ratio = 2.0_f64.sqrt();
    (0..points)
        .map(|k| rmax / ratio.powi((points - 1 - k) as i32))
        .collect()
}

/// The grid used by the trend checks: five geometric points spanning
/// `[rmax/2, rmax]`. The theorems' logarithmic moduli are vacuous below
/// `r = e`, so the trend is measured on the outer half of the search range.
pub fn trend_radius_grid(rmax: f64) -> Vec<f64> {
    let ratio = 2.0_f64.powf(0.25);
    (0..5).map(|k| rmax / 2.0 * ratio.powi(k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Total,
    Strip,
    Outside,
    SmallModulus,
    IntegratedN,
    Characteristic,
}

impl RowKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowKind::Total => "total",
            RowKind::Strip => "strip",
            RowKind::Outside => "outside",
            RowKind::SmallModulus => "small_modulus",
            RowKind::IntegratedN => "integrated_n",
            RowKind::Characteristic => "characteristic",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub r: f64,
    pub kind: RowKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strip_theta: Option<f64>,
    pub empirical: f64,
    pub predicted: f64,
    pub residual: f64,
    /// Residual over the law's error modulus (`r^{q-p} log^{3+ε} r` for the
    /// counting laws, `r^{q-p} + log r` for the rest).
    pub scaled_residual: f64,
    /// For counting laws: residual over the bare `r^{q-p}`, the error term
    /// conjectured to be attainable. Both scalings are reported; neither is
    /// adjudicated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaled_residual_plain: Option<f64>,
    /// Quadrature error estimate for characteristic rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aux: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub source: String,
    pub q: usize,
    pub p: usize,
    pub strip_c: Option<f64>,
    pub kappa: f64,
    pub hull_circumference: f64,
    pub hull0_circumference: f64,
    pub epsilon: f64,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub radii: Vec<f64>,
    pub rows: Vec<ReportRow>,
    pub epsilon: f64,
    pub metadata: ReportMeta,
}

/// `log r` floored away from zero so report rows stay finite on sub-`e`
/// grid radii, where the asymptotic modulus has no content anyway.
fn floored_ln(r: f64) -> f64 {
    r.ln().max(std::f64::consts::LN_2)
}

fn zeros_law_modulus(r: f64, error_exponent: usize, log_power: f64) -> f64 {
    r.powi(error_exponent as i32) * floored_ln(r).powf(log_power)
}

fn linear_law_modulus(r: f64, error_exponent: usize) -> f64 {
    r.powi(error_exponent as i32) + r.max(1.0).ln()
}

/// Empirical per-strip, total, outside and integrated counts against their
/// predictions, on the given radius grid. `zeros` must be complete out to
/// the largest radius.
pub fn verify_counts(
    f: &ExpPoly,
    source: &str,
    strips: &[StripSpec],
    zeros: &ZeroSet,
    radii: &[f64],
    epsilon: f64,
    kappa: f64,
) -> Result<CountReport> {
    let nf = f.normalize()?;
    let predictions = predict_all(&nf, epsilon)?;
    let classification = classify_by_strip(zeros, strips)?;
    let rmax = radii.iter().cloned().fold(0.0, f64::max);
    zeros.count_to(rmax)?; // surface incompleteness before doing any work

    let q = nf.order;
    let gap = nf.gap;
    let exp = q - gap;

    let strip_predictions: Vec<&Prediction> = predictions
        .iter()
        .filter(|p| matches!(p.kind, PredictionKind::StripZeroCount { .. }))
        .collect();
    let total_prediction = predictions
        .iter()
        .find(|p| p.kind == PredictionKind::TotalZeroCount)
        .expect("always emitted");
    let n_prediction = predictions
        .iter()
        .find(|p| p.kind == PredictionKind::IntegratedN)
        .expect("always emitted");

    let mut rows = Vec::new();
    for &r in radii {
        let modulus = zeros_law_modulus(r, exp, 3.0 + epsilon);
        let plain = r.powi(exp as i32);

        let empirical = zeros.count_to(r)? as f64;
        let predicted = total_prediction.leading_term(r);
        rows.push(ReportRow {
            r,
            kind: RowKind::Total,
            strip_theta: None,
            empirical,
            predicted,
            residual: empirical - predicted,
            scaled_residual: (empirical - predicted) / modulus,
            scaled_residual_plain: Some((empirical - predicted) / plain),
            aux: None,
        });

        for (i, strip) in strips.iter().enumerate() {
            let empirical = classification.strip_count_to(i, r) as f64;
            let predicted = strip_predictions
                .get(i)
                .map(|p| p.leading_term(r))
                .unwrap_or(0.0);
            rows.push(ReportRow {
                r,
                kind: RowKind::Strip,
                strip_theta: Some(strip.ray.angle),
                empirical,
                predicted,
                residual: empirical - predicted,
                scaled_residual: (empirical - predicted) / modulus,
                scaled_residual_plain: Some((empirical - predicted) / plain),
                aux: None,
            });
        }

        let outside = classification.outside_count_to(r) as f64;
        rows.push(ReportRow {
            r,
            kind: RowKind::Outside,
            strip_theta: None,
            empirical: outside,
            predicted: 0.0,
            residual: outside,
            scaled_residual: outside / linear_law_modulus(r, exp),
            scaled_residual_plain: None,
            aux: None,
        });

        let small: usize = classification
            .small_modulus
            .iter()
            .map(|&k| &classification.tagged.zeros[k])
            .filter(|z| z.location.norm() <= r)
            .map(|z| z.multiplicity)
            .sum();
        rows.push(ReportRow {
            r,
            kind: RowKind::SmallModulus,
            strip_theta: None,
            empirical: small as f64,
            predicted: 0.0,
            residual: small as f64,
            scaled_residual: small as f64 / linear_law_modulus(r, exp),
            scaled_residual_plain: None,
            aux: None,
        });

        let empirical_n = zeros.integrated_count_to(r)?;
        let predicted_n = n_prediction.leading_term(r);
        rows.push(ReportRow {
            r,
            kind: RowKind::IntegratedN,
            strip_theta: None,
            empirical: empirical_n,
            predicted: predicted_n,
            residual: empirical_n - predicted_n,
            scaled_residual: (empirical_n - predicted_n) / linear_law_modulus(r, exp),
            scaled_residual_plain: None,
            aux: None,
        });
    }

    let hull = convex_hull(&nf.conjugated_leadings())?;
    let mut with_origin = nf.conjugated_leadings();
    with_origin.push(Complex64::new(0.0, 0.0));
    let hull0 = convex_hull(&with_origin)?;
    Ok(CountReport {
        radii: radii.to_vec(),
        rows,
        epsilon,
        metadata: ReportMeta {
            source: source.to_string(),
            q,
            p: gap,
            strip_c: strips.first().map(|s| s.c),
            kappa,
            hull_circumference: hull.perimeter,
            hull0_circumference: hull0.perimeter,
            epsilon,
            runtime_seconds: 0.0,
        },
    })
}

/// `T(r,f)` by quadrature against `C(co(W⁰))·r^q/2π` on the grid. Radii are
/// evaluated in parallel; rows come out in grid order.
pub fn verify_characteristic(
    f: &ExpPoly,
    source: &str,
    radii: &[f64],
    epsilon: f64,
    kappa: f64,
) -> Result<CountReport> {
    let nf = f.normalize()?;
    let predictions = predict_all(&nf, epsilon)?;
    let t_prediction = predictions
        .iter()
        .find(|p| p.kind == PredictionKind::Characteristic)
        .expect("always emitted");
    let exp = nf.order - nf.gap;

    let samples: Result<Vec<_>> = radii
        .par_iter()
        .map(|&r| proximity(f, r).map(|p| (r, p)))
        .collect();
    let rows: Vec<ReportRow> = samples?
        .into_iter()
        .map(|(r, p)| {
            let predicted = t_prediction.leading_term(r);
            ReportRow {
                r,
                kind: RowKind::Characteristic,
                strip_theta: None,
                empirical: p.value,
                predicted,
                residual: p.value - predicted,
                scaled_residual: (p.value - predicted) / linear_law_modulus(r, exp),
                scaled_residual_plain: None,
                aux: Some(p.error_estimate),
            }
        })
        .collect();

    let hull = convex_hull(&nf.conjugated_leadings())?;
    let mut with_origin = nf.conjugated_leadings();
    with_origin.push(Complex64::new(0.0, 0.0));
    let hull0 = convex_hull(&with_origin)?;
    Ok(CountReport {
        radii: radii.to_vec(),
        rows,
        epsilon,
        metadata: ReportMeta {
            source: source.to_string(),
            q: nf.order,
            p: nf.gap,
            strip_c: None,
            kappa,
            hull_circumference: hull.perimeter,
            hull0_circumference: hull0.perimeter,
            epsilon,
            runtime_seconds: 0.0,
        },
    })
}

/// CSV with the fixed column set; floats in shortest round-trip form,
/// `.`-decimal, no locale.
pub fn report_to_csv(report: &CountReport) -> String {
    let mut out = String::from("r,kind,strip_theta,empirical,predicted,residual,scaled_residual\n");
    for row in &report.rows {
        let theta = row
            .strip_theta
            .map(|t| format!("{t}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.r,
            row.kind.as_str(),
            theta,
            row.empirical,
            row.predicted,
            row.residual,
            row.scaled_residual
        ));
    }
    out
}

pub fn report_to_json(report: &CountReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

/// Residual of a zero-count law at `r` against located-zero data; test hook
/// for the trend checks.
pub fn scaled_total_residual(
    zeros: &ZeroSet,
    prediction: &Prediction,
    r: f64,
    epsilon: f64,
    gap: usize,
) -> Result<f64> {
    let empirical = zeros.count_to(r)? as f64;
    let modulus = zeros_law_modulus(r, prediction.order - gap, 3.0 + epsilon);
    Ok((empirical - prediction.leading_term(r)) / modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::strips_for;
    use crate::parse::parse_expression;
    use crate::zeros::{locate_zeros, Region, ZeroSearchParams};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn sin_z() -> ExpPoly {
        parse_expression("(0-0.5*i)*exp(i*z)+(0.5*i)*exp(-i*z)").unwrap()
    }

    fn cosh_sq() -> ExpPoly {
        parse_expression("exp(z^2)+exp(-z^2)").unwrap()
    }

    fn geometric_sum() -> ExpPoly {
        parse_expression("1+exp(z)+exp(2*z)").unwrap()
    }

    fn find_coeff(preds: &[Prediction], kind: &PredictionKind) -> f64 {
        preds
            .iter()
            .find(|p| p.kind == *kind)
            .map(|p| p.coefficient)
            .unwrap()
    }

    #[test]
    fn predictions_for_sin() {
        let nf = sin_z().normalize().unwrap();
        let preds = predict_all(&nf, 1.0).unwrap();
        assert_abs_diff_eq!(
            find_coeff(&preds, &PredictionKind::TotalZeroCount),
            2.0 / PI,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            find_coeff(&preds, &PredictionKind::Characteristic),
            2.0 / PI,
            epsilon = 1e-14
        );
        let strips: Vec<&Prediction> = preds
            .iter()
            .filter(|p| matches!(p.kind, PredictionKind::StripZeroCount { .. }))
            .collect();
        assert_eq!(strips.len(), 2);
        for s in strips {
            assert_abs_diff_eq!(s.coefficient, 1.0 / PI, epsilon = 1e-14);
        }
    }

    #[test]
    fn predictions_for_cosh_sq() {
        let nf = cosh_sq().normalize().unwrap();
        let preds = predict_all(&nf, 1.0).unwrap();
        assert_abs_diff_eq!(
            find_coeff(&preds, &PredictionKind::TotalZeroCount),
            4.0 / PI,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            find_coeff(&preds, &PredictionKind::Characteristic),
            2.0 / PI,
            epsilon = 1e-14
        );
        let strips: Vec<&Prediction> = preds
            .iter()
            .filter(|p| matches!(p.kind, PredictionKind::StripZeroCount { .. }))
            .collect();
        assert_eq!(strips.len(), 4);
        for s in strips {
            assert_abs_diff_eq!(s.coefficient, 1.0 / PI, epsilon = 1e-14);
        }
    }

    #[test]
    fn predictions_for_geometric_sum() {
        let nf = geometric_sum().normalize().unwrap();
        let preds = predict_all(&nf, 1.0).unwrap();
        // hull [0,2] has circumference 4 with or without the origin
        assert_abs_diff_eq!(
            find_coeff(&preds, &PredictionKind::Characteristic),
            2.0 / PI,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            find_coeff(&preds, &PredictionKind::IntegratedN),
            2.0 / PI,
            epsilon = 1e-14
        );
    }

    #[test]
    fn strip_predictions_sum_to_total() {
        for f in [sin_z(), cosh_sq(), geometric_sum()] {
            let nf = f.normalize().unwrap();
            let preds = predict_all(&nf, 1.0).unwrap();
            let strip_sum: f64 = preds
                .iter()
                .filter(|p| matches!(p.kind, PredictionKind::StripZeroCount { .. }))
                .map(|p| p.coefficient)
                .sum();
            let total = find_coeff(&preds, &PredictionKind::TotalZeroCount);
            assert!(
                (strip_sum - total).abs() <= 1e-12,
                "{strip_sum} vs {total}"
            );
        }
    }

    #[test]
    fn hull_and_origin_hull_differ_when_origin_outside() {
        // e^z + e^{2z}: W = {1,2}, hull segment [1,2]; W⁰ hull is [0,2]
        let f = parse_expression("exp(z)+exp(2*z)").unwrap();
        let nf = f.normalize().unwrap();
        let preds = predict_all(&nf, 1.0).unwrap();
        assert_abs_diff_eq!(
            find_coeff(&preds, &PredictionKind::TotalZeroCount),
            2.0 / TAU,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            find_coeff(&preds, &PredictionKind::Characteristic),
            4.0 / TAU,
            epsilon = 1e-14
        );
        // and the report metadata shows both circumferences
        let zs = locate_zeros(
            &f,
            &Region::disk(Complex64::new(0.0, 0.0), 5.0),
            &ZeroSearchParams::default(),
        )
        .unwrap();
        let strips = strips_for(&nf, Some(2.0), 8.0, None).unwrap();
        let report =
            verify_counts(&f, "exp(z)+exp(2*z)", &strips, &zs, &[3.0, 5.0], 1.0, 8.0).unwrap();
        assert_abs_diff_eq!(report.metadata.hull_circumference, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(report.metadata.hull0_circumference, 4.0, epsilon = 1e-14);
    }

    #[test]
    fn verify_counts_cosh_sq_at_six() {
        let f = cosh_sq();
        let nf = f.normalize().unwrap();
        let strips = strips_for(&nf, None, 8.0, None).unwrap();
        let zs = locate_zeros(
            &f,
            &Region::disk(Complex64::new(0.0, 0.0), 6.0),
            &ZeroSearchParams::default(),
        )
        .unwrap();
        let report = verify_counts(&f, "cosh", &strips, &zs, &[6.0], 1.0, 8.0).unwrap();

        let strip_rows: Vec<&ReportRow> = report
            .rows
            .iter()
            .filter(|row| row.kind == RowKind::Strip)
            .collect();
        assert_eq!(strip_rows.len(), 4);
        for row in strip_rows {
            assert_eq!(row.empirical, 11.0);
            assert_abs_diff_eq!(row.predicted, 36.0 / PI, epsilon = 1e-12);
            assert!(row.residual.abs() < 0.5);
        }
        let total = report
            .rows
            .iter()
            .find(|row| row.kind == RowKind::Total)
            .unwrap();
        assert_eq!(total.empirical, 44.0);
        assert_abs_diff_eq!(total.predicted, 4.0 * 36.0 / PI, epsilon = 1e-12);
        let outside = report
            .rows
            .iter()
            .find(|row| row.kind == RowKind::Outside)
            .unwrap();
        assert_eq!(outside.empirical, 0.0);
    }

    #[test]
    fn verify_counts_sin_at_twenty() {
        let f = sin_z();
        let nf = f.normalize().unwrap();
        let strips = strips_for(&nf, None, 8.0, None).unwrap();
        let zs = locate_zeros(
            &f,
            &Region::disk(Complex64::new(0.0, 0.0), 20.0),
            &ZeroSearchParams::default(),
        )
        .unwrap();
        let report = verify_counts(&f, "sin", &strips, &zs, &[20.0], 1.0, 8.0).unwrap();
        let total = report
            .rows
            .iter()
            .find(|row| row.kind == RowKind::Total)
            .unwrap();
        assert_eq!(total.empirical, 13.0);
        assert_abs_diff_eq!(total.predicted, 40.0 / PI, epsilon = 1e-12);
    }

    #[test]
    fn characteristic_of_gaussian_pair_at_eight() {
        let f = cosh_sq();
        let report = verify_characteristic(&f, "cosh", &[8.0], 1.0, 8.0).unwrap();
        let row = &report.rows[0];
        // prediction 2·64/π ≈ 40.74
        assert_abs_diff_eq!(row.predicted, 2.0 * 64.0 / PI, epsilon = 1e-12);
        assert!(
            (row.empirical - row.predicted).abs() < 1.5,
            "T(8) = {} vs {}",
            row.empirical,
            row.predicted
        );
        assert!(row.aux.unwrap() < 1e-4);
    }

    #[test]
    fn characteristic_of_sin_trends_to_two_over_pi() {
        let f = sin_z();
        let radii = [10.0, 20.0, 40.0, 80.0];
        let report = verify_characteristic(&f, "sin", &radii, 1.0, 8.0).unwrap();
        let last = report.rows.last().unwrap();
        let ratio = last.empirical / (2.0 * 80.0 / PI);
        assert!(
            (0.95..=1.05).contains(&ratio),
            "T(80)/(2·80/π) = {ratio}"
        );
    }

    #[test]
    fn trend_grid_scaled_residuals_bounded() {
        // max/median ≤ 10 over the outer-half geometric grid
        for (f, rmax) in [(sin_z(), 20.0), (cosh_sq(), 6.0), (geometric_sum(), 20.0)] {
            let nf = f.normalize().unwrap();
            let preds = predict_all(&nf, 1.0).unwrap();
            let total = preds
                .iter()
                .find(|p| p.kind == PredictionKind::TotalZeroCount)
                .unwrap();
            let zs = locate_zeros(
                &f,
                &Region::disk(Complex64::new(0.0, 0.0), rmax),
                &ZeroSearchParams::default(),
            )
            .unwrap();
            let mut scaled: Vec<f64> = trend_radius_grid(rmax)
                .iter()
                .map(|&r| {
                    scaled_total_residual(&zs, total, r, 1.0, nf.gap)
                        .unwrap()
                        .abs()
                })
                .collect();
            scaled.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = scaled[scaled.len() / 2];
            let max = scaled[scaled.len() - 1];
            assert!(
                max / median.max(1e-12) <= 10.0,
                "max {max} / median {median} over {scaled:?}"
            );
        }
    }

    #[test]
    fn csv_has_fixed_columns() {
        let f = sin_z();
        let nf = f.normalize().unwrap();
        let strips = strips_for(&nf, None, 8.0, None).unwrap();
        let zs = locate_zeros(
            &f,
            &Region::disk(Complex64::new(0.0, 0.0), 10.0),
            &ZeroSearchParams::default(),
        )
        .unwrap();
        let report = verify_counts(&f, "sin", &strips, &zs, &[5.0, 10.0], 1.0, 8.0).unwrap();
        let csv = report_to_csv(&report);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "r,kind,strip_theta,empirical,predicted,residual,scaled_residual"
        );
        for line in lines {
            assert_eq!(line.split(',').count(), 7, "bad row: {line}");
        }
        // JSON serializes without panicking and parses back
        let json = report_to_json(&report);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["metadata"]["q"], 1);
    }
}
