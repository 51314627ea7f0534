//! Two-sided product-vs-uniform comparison on the thick shell.
//!
//! For a nonnegative bounded functional f, the conditioned product law and
//! the uniform law on the shell satisfy
//!
//! ```text
//! exp(-B eps n) E f(X^eps) <= E(f(Y) | Y in shell) <= exp(B eps n) E f(X^eps)
//! ```
//!
//! with `B = 2 b r + 4 |s|`. Both sides are estimated by rejection: the
//! uniform side from a bounding box (which is why n is capped at 12), the
//! product side from i.i.d. tilted draws. The bracket is tested after
//! widening each side by three combined standard errors.

use crate::error::{Error, Result};
use crate::geometry::ShellSpec;
use crate::rng::seed_stream;
use crate::samplers::sandwich_rate;
use crate::tilted::{sample_tilted, TiltedParams};
use crate::workers::run_partitioned;
use rand::Rng;
use serde::Serialize;

/// Built-in nonnegative bounded test functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunctional {
    /// f = 1; the bracket always holds.
    One,
    /// indicator of x_1 <= 1
    IndicatorX1Le1,
    /// fraction of coordinates <= 1
    FracLe1,
    /// minimum coordinate
    MinCoord,
    /// x_1 clipped at 2
    X1Capped2,
}

impl TestFunctional {
    pub const ALL: [TestFunctional; 5] = [
        TestFunctional::One,
        TestFunctional::IndicatorX1Le1,
        TestFunctional::FracLe1,
        TestFunctional::MinCoord,
        TestFunctional::X1Capped2,
    ];

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunctional::One => 1.0,
            TestFunctional::IndicatorX1Le1 => f64::from(u8::from(x[0] <= 1.0)),
            TestFunctional::FracLe1 => {
                x.iter().filter(|&&v| v <= 1.0).count() as f64 / x.len() as f64
            }
            TestFunctional::MinCoord => x.iter().cloned().fold(f64::INFINITY, f64::min),
            TestFunctional::X1Capped2 => x[0].min(2.0),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            TestFunctional::One => "one",
            TestFunctional::IndicatorX1Le1 => "indicator_x1_le_1",
            TestFunctional::FracLe1 => "frac_le_1",
            TestFunctional::MinCoord => "min_coord",
            TestFunctional::X1Capped2 => "x1_capped_2",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub functional: TestFunctional,
    pub b_rate: f64,
    /// exp(-B eps n) * (uniform-side estimate)
    pub lhs: f64,
    /// conditioned-product estimate
    pub mid: f64,
    /// exp(+B eps n) * (uniform-side estimate)
    pub rhs: f64,
    pub pass: bool,
    pub uniform_estimate: f64,
    pub uniform_std_err: f64,
    pub product_std_err: f64,
    pub box_accepts: u64,
    pub box_proposals: u64,
    pub product_accepts: u64,
    pub product_proposals: u64,
}

struct Side {
    sums: Vec<f64>,
    sums_sq: Vec<f64>,
    accepts: u64,
}

fn merge_sides(parts: Vec<Side>, k: usize) -> Side {
    let mut out = Side {
        sums: vec![0.0; k],
        sums_sq: vec![0.0; k],
        accepts: 0,
    };
    for p in parts {
        out.accepts += p.accepts;
        for i in 0..k {
            out.sums[i] += p.sums[i];
            out.sums_sq[i] += p.sums_sq[i];
        }
    }
    out
}

/// Run every built-in functional through the same pair of rejection runs.
pub fn sandwich_check_all(
    shell: &ShellSpec,
    p: &TiltedParams,
    n_reps: u64,
    seed: u64,
    threads: usize,
) -> Result<Vec<SandwichReport>> {
    TiltedParams::new(p.r, p.s)?;
    if shell.n > 12 {
        return Err(Error::InvalidArgument(format!(
            "sandwich_check: the box oracle is infeasible beyond n = 12, got n = {}",
            shell.n
        )));
    }
    let n = shell.n;
    let nf = n as f64;
    let funcs = TestFunctional::ALL;
    let k = funcs.len();
    let (lo1, hi1) = (nf * (1.0 + shell.eps), nf * (1.0 + 2.0 * shell.eps));
    let (lo2, hi2) = (
        nf * (shell.b + shell.eps),
        nf * (shell.b + shell.b * shell.eps),
    );

    // uniform side: Lebesgue rejection from the bounding box (0, box_hi)^n
    let box_hi = (nf * shell.b * (1.0 + shell.eps)).sqrt();
    let box_parts = run_partitioned(n_reps as usize, threads, |worker, share| {
        let mut rng = seed_stream(seed, worker);
        let mut side = Side {
            sums: vec![0.0; k],
            sums_sq: vec![0.0; k],
            accepts: 0,
        };
        let mut x = vec![0.0f64; n];
        for _ in 0..share {
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for v in &mut x {
                let u: f64 = rng.random::<f64>() * box_hi;
                *v = u;
                sum += u;
                sumsq += u * u;
            }
            if sum > lo1 && sum < hi1 && sumsq > lo2 && sumsq < hi2 && x.iter().all(|&v| v > 0.0)
            {
                side.accepts += 1;
                for (i, f) in funcs.iter().enumerate() {
                    let val = f.eval(&x);
                    side.sums[i] += val;
                    side.sums_sq[i] += val * val;
                }
            }
        }
        Ok(side)
    })?;
    let box_side = merge_sides(box_parts, k);
    if box_side.accepts == 0 {
        return Err(Error::Inconclusive {
            side: "uniform-box",
            proposals: n_reps,
        });
    }

    // product side: i.i.d. tilted coordinates conditioned on the shell
    let prod_parts = run_partitioned(n_reps as usize, threads, |worker, share| {
        // offset the stream block so the two sides never share draws
        let mut rng = seed_stream(seed, worker + (threads as u64).max(1));
        let mut side = Side {
            sums: vec![0.0; k],
            sums_sq: vec![0.0; k],
            accepts: 0,
        };
        let mut y = vec![0.0f64; n];
        for _ in 0..share {
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for v in &mut y {
                let t = sample_tilted(p, &mut rng);
                *v = t;
                sum += t;
                sumsq += t * t;
            }
            if sum > lo1 && sum < hi1 && sumsq > lo2 && sumsq < hi2 {
                side.accepts += 1;
                for (i, f) in funcs.iter().enumerate() {
                    let val = f.eval(&y);
                    side.sums[i] += val;
                    side.sums_sq[i] += val * val;
                }
            }
        }
        Ok(side)
    })?;
    let prod_side = merge_sides(prod_parts, k);
    if prod_side.accepts == 0 {
        return Err(Error::Inconclusive {
            side: "conditioned-product",
            proposals: n_reps,
        });
    }

    let rate = sandwich_rate(shell.b, p);
    let width = (rate * shell.eps * nf).exp();
    let mut reports = Vec::with_capacity(k);
    for (i, f) in funcs.iter().enumerate() {
        let mean_se = |side: &Side| {
            let acc = side.accepts as f64;
            let mean = side.sums[i] / acc;
            let var = (side.sums_sq[i] / acc - mean * mean).max(0.0);
            (mean, (var / acc).sqrt())
        };
        let (u_mean, u_se) = mean_se(&box_side);
        let (p_mean, p_se) = mean_se(&prod_side);
        let lhs = u_mean / width;
        let rhs = u_mean * width;
        let lo_slack = 3.0 * ((u_se / width).powi(2) + p_se * p_se).sqrt();
        let hi_slack = 3.0 * ((u_se * width).powi(2) + p_se * p_se).sqrt();
        let pass = p_mean >= lhs - lo_slack && p_mean <= rhs + hi_slack;
        reports.push(SandwichReport {
            functional: *f,
            b_rate: rate,
            lhs,
            mid: p_mean,
            rhs,
            pass,
            uniform_estimate: u_mean,
            uniform_std_err: u_se,
            product_std_err: p_se,
            box_accepts: box_side.accepts,
            box_proposals: n_reps,
            product_accepts: prod_side.accepts,
            product_proposals: n_reps,
        });
    }
    Ok(reports)
}

/// Single-functional variant of [`sandwich_check_all`].
pub fn sandwich_check(
    shell: &ShellSpec,
    p: &TiltedParams,
    f: TestFunctional,
    n_reps: u64,
    seed: u64,
    threads: usize,
) -> Result<SandwichReport> {
    let all = sandwich_check_all(shell, p, n_reps, seed, threads)?;
    Ok(all
        .into_iter()
        .find(|r| r.functional == f)
        .expect("requested functional is built in"))
}
