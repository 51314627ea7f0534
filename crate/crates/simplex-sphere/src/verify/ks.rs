//! Kolmogorov-Smirnov statistics against analytic and empirical references.

use crate::error::{Error, Result};
use serde::Serialize;

/// 1% critical coefficient: the one-sample threshold is 1.63/sqrt(N) and
/// the two-sample one 1.63*sqrt((N1+N2)/(N1*N2)).
pub const KS_CRITICAL_1PCT_COEFF: f64 = 1.63;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KsReference {
    Tilted { r: f64, s: f64 },
    Exp1,
    Empirical,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub n_samples: usize,
    pub reference: KsReference,
    pub critical_1pct: f64,
}

impl KsReport {
    pub fn below_critical(&self) -> bool {
        self.statistic < self.critical_1pct
    }
}

/// One-sample statistic: sup over the sorted sample of
/// max(|i/N - F(v_i)|, |(i-1)/N - F(v_i)|).
pub fn ks_one_sample<F: Fn(f64) -> f64>(
    values: &[f64],
    cdf: F,
    reference: KsReference,
) -> Result<KsReport> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("ks_one_sample: empty sample".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut stat: f64 = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        let f = cdf(v);
        let hi = ((i + 1) as f64 / n - f).abs();
        let lo = (i as f64 / n - f).abs();
        stat = stat.max(hi).max(lo);
    }
    Ok(KsReport {
        statistic: stat,
        n_samples: sorted.len(),
        reference,
        critical_1pct: KS_CRITICAL_1PCT_COEFF / n.sqrt(),
    })
}

/// Two-sample statistic: sup difference of the two empirical CDFs.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<KsReport> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::InvalidArgument("ks_two_sample: empty sample".into()));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut stat: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        stat = stat.max((i as f64 / na - j as f64 / nb).abs());
    }
    let critical = KS_CRITICAL_1PCT_COEFF * ((na + nb) / (na * nb)).sqrt();
    Ok(KsReport {
        statistic: stat,
        n_samples: xs.len() + ys.len(),
        reference: KsReference::Empirical,
        critical_1pct: critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_against_uniform() {
        let r = ks_one_sample(&[0.5], |x| x, KsReference::Empirical).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-15);
        assert_eq!(r.n_samples, 1);
    }

    #[test]
    fn statistic_is_positive_on_finite_samples() {
        let vals = [0.11, 0.52, 0.74, 0.93];
        let r = ks_one_sample(&vals, |x| x, KsReference::Empirical).unwrap();
        assert!(r.statistic > 0.0);
    }

    #[test]
    fn identical_two_samples_have_zero_distance() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [2.0, 1.0, 4.0, 3.0];
        let r = ks_two_sample(&xs, &ys).unwrap();
        assert_eq!(r.statistic, 0.0);
    }

    #[test]
    fn two_sample_known_values() {
        let xs = [1.0, 1.0, 4.0, 4.0];
        let ys = [1.0, 1.0, 1.0, 4.0];
        let r = ks_two_sample(&xs, &ys).unwrap();
        assert!((r.statistic - 0.25).abs() < 1e-12);

        let xs = [0.42, 0.24, 0.86, 0.85, 0.82, 0.82, 0.25, 0.78, 0.13, 0.27];
        let ys = [0.24, 0.27, 0.87, 0.29, 0.57, 0.44, 0.5, 0.00, 0.56, 0.03];
        let r = ks_two_sample(&xs, &ys).unwrap();
        assert!((r.statistic - 0.4).abs() < 1e-12);
    }

    #[test]
    fn permutation_invariance() {
        let vals = [0.3, 0.9, 0.1, 0.7, 0.5];
        let mut rev = vals;
        rev.reverse();
        let a = ks_one_sample(&vals, |x| x, KsReference::Empirical).unwrap();
        let b = ks_one_sample(&rev, |x| x, KsReference::Empirical).unwrap();
        assert_eq!(a.statistic, b.statistic);
    }

    #[test]
    fn critical_values_follow_the_stated_formulas() {
        let r = ks_one_sample(&[0.5; 100], |x| x, KsReference::Empirical).unwrap();
        assert!((r.critical_1pct - 1.63 / 10.0).abs() < 1e-12);
        let r = ks_two_sample(&[0.5; 100], &[0.2; 400]).unwrap();
        let expect = 1.63 * ((500.0) / (100.0 * 400.0_f64)).sqrt();
        assert!((r.critical_1pct - expect).abs() < 1e-12);
    }
}
