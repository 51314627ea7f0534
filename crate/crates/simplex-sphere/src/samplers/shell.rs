//! Thick-shell conditioned product sampler.
//!
//! Draws i.i.d. tilted coordinates and keeps the vectors that land in the
//! shell. The accepted law is the product law conditioned on the shell,
//! which brackets the uniform-on-shell law within a factor exp(+-B eps n),
//! B = 2 b r + 4 |s|.

use super::{run_partitioned, INFEASIBLE_PROPOSALS};
use crate::batch::{SampleBatch, SamplerId};
use crate::error::{Error, Result};
use crate::geometry::{ManifoldSpec, Point, ShellSpec};
use crate::rng::{seed_stream, Stream};
use crate::tilted::{sample_tilted, TiltedParams};
use serde::Serialize;

/// Lemma constant governing the sandwich width for this tilt.
pub fn sandwich_rate(b: f64, p: &TiltedParams) -> f64 {
    2.0 * b * p.r + 4.0 * p.s.abs()
}

struct Partial {
    points: Vec<Point>,
    proposals: u64,
}

fn sample_worker(
    shell: &ShellSpec,
    p: &TiltedParams,
    count: usize,
    rng: &mut Stream,
) -> Result<Partial> {
    let n = shell.n;
    let nf = n as f64;
    let (lo1, hi1) = (nf * (1.0 + shell.eps), nf * (1.0 + 2.0 * shell.eps));
    let (lo2, hi2) = (
        nf * (shell.b + shell.eps),
        nf * (shell.b + shell.b * shell.eps),
    );
    let mut points = Vec::with_capacity(count);
    let mut proposals = 0u64;
    let mut y = vec![0.0f64; n];
    while points.len() < count {
        proposals += 1;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for v in &mut y {
            let x = sample_tilted(p, rng);
            *v = x;
            sum += x;
            sumsq += x * x;
        }
        if sum > lo1 && sum < hi1 && sumsq > lo2 && sumsq < hi2 {
            points.push(y.clone());
        } else if points.is_empty() && proposals >= INFEASIBLE_PROPOSALS {
            return Err(Error::InfeasibleRejection { proposals });
        }
    }
    Ok(Partial { points, proposals })
}

/// Draw `count` shell points using a caller-provided stream (seed recorded
/// as 0).
pub fn sample_shell(
    shell: &ShellSpec,
    p: &TiltedParams,
    count: usize,
    rng: &mut Stream,
) -> Result<SampleBatch> {
    TiltedParams::new(p.r, p.s)?;
    let partial = sample_worker(shell, p, count, rng)?;
    build(shell, partial, 0)
}

/// Draw `count` shell points with `threads` workers derived from `seed`.
pub fn sample_shell_seeded(
    shell: &ShellSpec,
    p: &TiltedParams,
    count: usize,
    seed: u64,
    threads: usize,
) -> Result<SampleBatch> {
    TiltedParams::new(p.r, p.s)?;
    let partials = run_partitioned(count, threads, |worker, share| {
        let mut rng = seed_stream(seed, worker);
        sample_worker(shell, p, share, &mut rng)
    })?;
    let mut merged = Partial {
        points: Vec::with_capacity(count),
        proposals: 0,
    };
    for part in partials {
        merged.proposals += part.proposals;
        merged.points.extend(part.points);
    }
    build(shell, merged, seed)
}

fn build(shell: &ShellSpec, partial: Partial, seed: u64) -> Result<SampleBatch> {
    Ok(SampleBatch {
        accepts: partial.points.len() as u64,
        proposals: partial.proposals,
        points: partial.points,
        spec: ManifoldSpec::new(shell.n, shell.b)?,
        sampler_id: SamplerId::Shell,
        seed,
        shell: Some(*shell),
        gibbs_sweeps: None,
    })
}

/// Shell acceptance probability estimate over a fixed number of proposals.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AcceptanceEstimate {
    pub accepts: u64,
    pub proposals: u64,
    pub rate: f64,
    /// Binomial standard error of `rate`.
    pub std_err: f64,
}

pub fn shell_acceptance(
    shell: &ShellSpec,
    p: &TiltedParams,
    proposals: u64,
    seed: u64,
    threads: usize,
) -> Result<AcceptanceEstimate> {
    TiltedParams::new(p.r, p.s)?;
    let n = shell.n;
    let nf = n as f64;
    let (lo1, hi1) = (nf * (1.0 + shell.eps), nf * (1.0 + 2.0 * shell.eps));
    let (lo2, hi2) = (
        nf * (shell.b + shell.eps),
        nf * (shell.b + shell.b * shell.eps),
    );
    let counts = run_partitioned(proposals as usize, threads, |worker, share| {
        let mut rng = seed_stream(seed, worker);
        let mut accepts = 0u64;
        for _ in 0..share {
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..n {
                let x = sample_tilted(p, &mut rng);
                sum += x;
                sumsq += x * x;
            }
            if sum > lo1 && sum < hi1 && sumsq > lo2 && sumsq < hi2 {
                accepts += 1;
            }
        }
        Ok(accepts)
    })?;
    let accepts: u64 = counts.iter().sum();
    let rate = accepts as f64 / proposals as f64;
    Ok(AcceptanceEstimate {
        accepts,
        proposals,
        rate,
        std_err: (rate * (1.0 - rate) / proposals as f64).sqrt(),
    })
}
