//! Empirical check of the local limit theorem for the normalized pair
//! (sum, sum of squares) of i.i.d. tilted draws.
//!
//! `V_n = n^{-1/2} (sum(Y_i - m1), sum(Y_i^2 - m2))` is simulated `n_reps`
//! times; its density histogram over a +-4 sigma rectangle is compared in
//! sup norm against the centered bivariate Gaussian whose covariance is
//! assembled from the tilt's moments of orders 1..4.

use crate::error::{Error, Result};
use crate::rng::seed_stream;
use crate::tilted::{sample_tilted, tilted_moments, value_square_covariance, TiltedParams};
use crate::workers::run_partitioned;
use serde::Serialize;
use std::f64::consts::TAU;

#[derive(Debug, Clone, Serialize)]
pub struct LltReport {
    pub r: f64,
    pub s: f64,
    pub n: usize,
    pub n_reps: usize,
    pub bins: usize,
    /// Covariance of (Y, Y^2) from the moment routes.
    pub cov: [[f64; 2]; 2],
    /// Empirical covariance of V_n and the standard errors of its entries.
    pub emp_cov: [[f64; 2]; 2],
    pub emp_cov_se: [[f64; 2]; 2],
    /// Histogram rectangle half-widths (4 marginal standard deviations).
    pub half_width: [f64; 2],
    /// Bin probabilities (row-major, x fastest); they sum to at most 1.
    pub grid: Vec<f64>,
    /// Limiting Gaussian density at the bin centers.
    pub rho: Vec<f64>,
    /// sup over bins of |bin density - rho(bin center)|.
    pub sup_err: f64,
}

pub fn llt_check(
    p: &TiltedParams,
    n: usize,
    n_reps: usize,
    bins: usize,
    seed: u64,
    threads: usize,
) -> Result<LltReport> {
    if n < 10 {
        return Err(Error::InvalidArgument(format!(
            "llt_check: n must be >= 10, got {n}"
        )));
    }
    if n_reps < 10_000 {
        return Err(Error::InvalidArgument(format!(
            "llt_check: n_reps must be >= 1e4, got {n_reps}"
        )));
    }
    let m = tilted_moments(p)?;
    let cov = value_square_covariance(&m);
    let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[0][1];
    if det < 1e-12 {
        return Err(Error::DegenerateCovariance(det));
    }
    let half_width = [4.0 * cov[0][0].sqrt(), 4.0 * cov[1][1].sqrt()];
    let (m1, m2) = (m.m1, m.m2);
    let sqrt_n = (n as f64).sqrt();

    struct Acc {
        counts: Vec<u64>,
        sum: [f64; 2],
        prod: [f64; 3],    // v1^2, v1*v2, v2^2
        prod_sq: [f64; 3], // squares of the same products, for SEs
    }
    let parts = run_partitioned(n_reps, threads, |worker, reps| {
        let mut rng = seed_stream(seed, worker);
        let mut acc = Acc {
            counts: vec![0u64; bins * bins],
            sum: [0.0; 2],
            prod: [0.0; 3],
            prod_sq: [0.0; 3],
        };
        for _ in 0..reps {
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for _ in 0..n {
                let y = sample_tilted(p, &mut rng);
                s1 += y - m1;
                s2 += y * y - m2;
            }
            let v1 = s1 / sqrt_n;
            let v2 = s2 / sqrt_n;
            acc.sum[0] += v1;
            acc.sum[1] += v2;
            for (slot, val) in acc
                .prod
                .iter_mut()
                .zip([v1 * v1, v1 * v2, v2 * v2])
            {
                *slot += val;
            }
            for (slot, val) in acc
                .prod_sq
                .iter_mut()
                .zip([v1 * v1, v1 * v2, v2 * v2])
            {
                *slot += val * val;
            }
            let fx = (v1 + half_width[0]) / (2.0 * half_width[0]) * bins as f64;
            let fy = (v2 + half_width[1]) / (2.0 * half_width[1]) * bins as f64;
            if fx >= 0.0 && fy >= 0.0 {
                let (ix, iy) = (fx as usize, fy as usize);
                if ix < bins && iy < bins {
                    acc.counts[iy * bins + ix] += 1;
                }
            }
        }
        Ok(acc)
    })?;

    let mut counts = vec![0u64; bins * bins];
    let mut sum = [0.0; 2];
    let mut prod = [0.0; 3];
    let mut prod_sq = [0.0; 3];
    for part in parts {
        for (a, b) in counts.iter_mut().zip(part.counts) {
            *a += b;
        }
        for k in 0..2 {
            sum[k] += part.sum[k];
        }
        for k in 0..3 {
            prod[k] += part.prod[k];
            prod_sq[k] += part.prod_sq[k];
        }
    }
    let reps_f = n_reps as f64;
    let mean = [sum[0] / reps_f, sum[1] / reps_f];
    let c11 = prod[0] / reps_f - mean[0] * mean[0];
    let c12 = prod[1] / reps_f - mean[0] * mean[1];
    let c22 = prod[2] / reps_f - mean[1] * mean[1];
    let emp_cov = [[c11, c12], [c12, c22]];
    // SE of a mean-of-products; mean subtraction contributes O(1/reps)
    let se = |k: usize| {
        let m_p = prod[k] / reps_f;
        let var = prod_sq[k] / reps_f - m_p * m_p;
        (var / reps_f).sqrt()
    };
    let emp_cov_se = [[se(0), se(1)], [se(1), se(2)]];

    // limiting Gaussian density over the grid
    let inv = [
        [cov[1][1] / det, -cov[0][1] / det],
        [-cov[0][1] / det, cov[0][0] / det],
    ];
    let norm = 1.0 / (TAU * det.sqrt());
    let bin_w = [
        2.0 * half_width[0] / bins as f64,
        2.0 * half_width[1] / bins as f64,
    ];
    let area = bin_w[0] * bin_w[1];
    let mut rho = Vec::with_capacity(bins * bins);
    let mut grid = Vec::with_capacity(bins * bins);
    let mut sup_err: f64 = 0.0;
    for iy in 0..bins {
        let y = -half_width[1] + (iy as f64 + 0.5) * bin_w[1];
        for ix in 0..bins {
            let x = -half_width[0] + (ix as f64 + 0.5) * bin_w[0];
            let quad = inv[0][0] * x * x + 2.0 * inv[0][1] * x * y + inv[1][1] * y * y;
            let dens = norm * (-0.5 * quad).exp();
            rho.push(dens);
            let prob = counts[iy * bins + ix] as f64 / reps_f;
            grid.push(prob);
            sup_err = sup_err.max((prob / area - dens).abs());
        }
    }
    Ok(LltReport {
        r: p.r,
        s: p.s,
        n,
        n_reps,
        bins,
        cov,
        emp_cov,
        emp_cov_se,
        half_width,
        grid,
        rho,
        sup_err,
    })
}
