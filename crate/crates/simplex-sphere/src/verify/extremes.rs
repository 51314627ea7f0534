//! Extreme-coordinate statistics: the localization ratios for b > 2 and the
//! max-coordinate scaling probes for b <= 2.

use super::{median, quantile};
use crate::batch::SampleBatch;
use crate::error::{Error, Result};
use serde::Serialize;

/// Per-point extremes. `ratio_loc = M^2/((b-2)n)` exists only for b > 2;
/// `ratio_m2 = M2^2/n` always does.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExtremeReport {
    pub max: f64,
    pub second: f64,
    pub ratio_loc: Option<f64>,
    pub ratio_m2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremeSummary {
    pub median_max: f64,
    pub median_ratio_loc: Option<f64>,
    pub q05_ratio_loc: Option<f64>,
    pub q95_ratio_loc: Option<f64>,
    pub median_ratio_m2: f64,
    pub q05_ratio_m2: f64,
    pub q95_ratio_m2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremesOutput {
    pub per_point: Vec<ExtremeReport>,
    pub summary: ExtremeSummary,
}

pub fn extreme_report(batch: &SampleBatch) -> Result<ExtremesOutput> {
    if batch.points.is_empty() {
        return Err(Error::InvalidArgument("extreme_report: empty batch".into()));
    }
    let n = batch.spec.n as f64;
    let b = batch.spec.b;
    let loc_scale = (b > 2.0).then(|| (b - 2.0) * n);
    let per_point: Vec<ExtremeReport> = batch
        .points
        .iter()
        .map(|p| {
            let mut max = f64::NEG_INFINITY;
            let mut second = f64::NEG_INFINITY;
            for &v in p {
                if v > max {
                    second = max;
                    max = v;
                } else if v > second {
                    second = v;
                }
            }
            ExtremeReport {
                max,
                second,
                ratio_loc: loc_scale.map(|s| max * max / s),
                ratio_m2: second * second / n,
            }
        })
        .collect();
    let maxes: Vec<f64> = per_point.iter().map(|e| e.max).collect();
    let m2s: Vec<f64> = per_point.iter().map(|e| e.ratio_m2).collect();
    let locs: Option<Vec<f64>> = loc_scale
        .is_some()
        .then(|| per_point.iter().filter_map(|e| e.ratio_loc).collect());
    let summary = ExtremeSummary {
        median_max: median(&maxes),
        median_ratio_loc: locs.as_ref().map(|l| median(l)),
        q05_ratio_loc: locs.as_ref().map(|l| quantile(l, 0.05)),
        q95_ratio_loc: locs.as_ref().map(|l| quantile(l, 0.95)),
        median_ratio_m2: median(&m2s),
        q05_ratio_m2: quantile(&m2s, 0.05),
        q95_ratio_m2: quantile(&m2s, 0.95),
    };
    Ok(ExtremesOutput { per_point, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::batch::SamplerId;
    use crate::geometry::{psi, ManifoldSpec};

    #[test]
    fn ratio_loc_absent_below_the_transition() {
        let spec = ManifoldSpec::new(5, 1.5).unwrap();
        let batch = SampleBatch {
            points: vec![psi(&[2.0, 0.5, 0.8, 1.2, 0.6], &spec)],
            spec,
            sampler_id: SamplerId::Exact,
            seed: 0,
            proposals: 1,
            accepts: 1,
            shell: None,
            gibbs_sweeps: None,
        };
        let out = extreme_report(&batch).unwrap();
        assert!(out.per_point[0].ratio_loc.is_none());
        assert!(out.summary.median_ratio_loc.is_none());
        assert!(out.per_point[0].max >= out.per_point[0].second);
    }

    #[test]
    fn localization_ratio_computed_for_b_above_two() {
        let spec = ManifoldSpec::new(4, 3.0).unwrap();
        let batch = SampleBatch {
            points: vec![psi(&[3.0, 0.5, 0.4, 0.3], &spec)],
            spec,
            sampler_id: SamplerId::Exact,
            seed: 0,
            proposals: 1,
            accepts: 1,
            shell: None,
            gibbs_sweeps: None,
        };
        let out = extreme_report(&batch).unwrap();
        let e = &out.per_point[0];
        let expect = e.max * e.max / ((3.0 - 2.0) * 4.0);
        assert!((e.ratio_loc.unwrap() - expect).abs() < 1e-15);
    }
}
