//! Coordinate moments with bootstrap standard errors.

use crate::batch::SampleBatch;
use crate::error::{Error, Result};
use crate::rng::seed_stream;
use rand::Rng;
use serde::Serialize;

const BOOTSTRAP_RESAMPLES: usize = 256;
/// Stream index reserved for the bootstrap so it never collides with the
/// sampler workers of the same seed.
const BOOTSTRAP_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentEntry {
    pub k: u32,
    /// Coordinate-level mean of x^k over the whole batch (all coordinates
    /// of all points; exchangeability makes them identically distributed).
    pub value: f64,
    /// Bootstrap standard error, resampling points (never coordinates:
    /// coordinates within a point are dependent).
    pub std_err: f64,
}

pub fn moment_report(batch: &SampleBatch, k_max: u32) -> Result<Vec<MomentEntry>> {
    if batch.points.is_empty() {
        return Err(Error::InvalidArgument("moment_report: empty batch".into()));
    }
    if !(1..=4).contains(&k_max) {
        return Err(Error::InvalidArgument(format!(
            "moment_report: k_max must be in 1..=4, got {k_max}"
        )));
    }
    let n_points = batch.points.len();
    let mut entries = Vec::with_capacity(k_max as usize);
    let mut rng = seed_stream(batch.seed, BOOTSTRAP_STREAM);
    for k in 1..=k_max {
        // per-point means of x^k; the batch statistic is their average
        let per_point: Vec<f64> = batch
            .points
            .iter()
            .map(|p| p.iter().map(|&v| v.powi(k as i32)).sum::<f64>() / p.len() as f64)
            .collect();
        let value = per_point.iter().sum::<f64>() / n_points as f64;
        let mut boots = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
        for _ in 0..BOOTSTRAP_RESAMPLES {
            let mut acc = 0.0;
            for _ in 0..n_points {
                acc += per_point[rng.random_range(0..n_points)];
            }
            boots.push(acc / n_points as f64);
        }
        let mean_b = boots.iter().sum::<f64>() / boots.len() as f64;
        let var_b = boots.iter().map(|b| (b - mean_b).powi(2)).sum::<f64>()
            / (boots.len() - 1) as f64;
        entries.push(MomentEntry {
            k,
            value,
            std_err: var_b.sqrt(),
        });
    }
    Ok(entries)
}
