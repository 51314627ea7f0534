//! Statistical harness: turns sample batches into pass/fail evidence for
//! the marginal-convergence, localization, and rate claims.

mod extremes;
mod ks;
mod llt;
mod moments;
mod sandwich;

pub use extremes::{extreme_report, ExtremeReport, ExtremeSummary, ExtremesOutput};
pub use ks::{ks_one_sample, ks_two_sample, KsReference, KsReport, KS_CRITICAL_1PCT_COEFF};
pub use llt::{llt_check, LltReport};
pub use moments::{moment_report, MomentEntry};
pub use sandwich::{sandwich_check, sandwich_check_all, SandwichReport, TestFunctional};

/// Standard deviation of the Kolmogorov distribution, used as the yardstick
/// for "n-sigma" slack between KS statistics measured at different n
/// (the statistic's sampling scale is KOLMOGOROV_SD / sqrt(N)).
pub const KOLMOGOROV_SD: f64 = 0.2603;

/// Interpolated quantile of an unsorted sample (linear between order
/// statistics). `q` in [0, 1].
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of empty sample");
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    v[lo] + (v[hi] - v[lo]) * frac
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}
