//! Constraint-preserving Gibbs sampler.
//!
//! Fixing all coordinates but three leaves a one-dimensional fiber: the
//! triple (y_i, y_j, y_k) with prescribed sum s3 and square sum q3 lies on
//! the circle of radius rho = sqrt(q3 - s3^2/3) around (s3/3)(1,1,1) inside
//! the sum-zero plane. The gradient Gram determinant of the two constraints
//! is constant along that circle, so the correct conditional for the
//! uniform law is uniform on the positive part of the circle. Each move
//! resamples a random triple exactly from that conditional, which preserves
//! both global constraints bit-for-bit up to float drift; a projection
//! through psi once per sweep cancels the drift.
//!
//! Agreement with the exact rejection sampler is a test obligation, not an
//! assumption; see the sampler oracle suite.

use super::run_partitioned;
use crate::batch::{SampleBatch, SamplerId};
use crate::error::{Error, Result};
use crate::geometry::{psi_in_place, ManifoldSpec, Point};
use crate::rng::{seed_stream, Stream};
use rand::Rng;
use std::f64::consts::{FRAC_PI_6, PI, TAU};

const SQRT_6: f64 = 2.449_489_742_783_178;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const FRAC_1_SQRT_6: f64 = 0.408_248_290_463_863_05;

/// Angles of the three coordinate directions in the fiber parametrization;
/// coordinate i of the fiber point is s3/3 + rho*sqrt(2/3)*cos(theta - c_i).
pub const FIBER_ARC_CENTERS: [f64; 3] = [FRAC_PI_6, PI - FRAC_PI_6, 1.5 * PI];

/// The fiber point at angle theta on the circle with sum s3 and square sum
/// q3 (orthonormal frame u = (1,-1,0)/sqrt2, v = (1,1,-2)/sqrt6).
pub fn fiber_point(s3: f64, q3: f64, theta: f64) -> [f64; 3] {
    let rho = (q3 - s3 * s3 / 3.0).max(0.0).sqrt();
    let (sin_t, cos_t) = theta.sin_cos();
    let c = s3 / 3.0;
    let a = rho * cos_t * FRAC_1_SQRT_2;
    let b = rho * sin_t * FRAC_1_SQRT_6;
    [c + a + b, c - a + b, c - 2.0 * b]
}

/// The exact union of angle intervals on the fiber circle where all three
/// coordinates are positive. Returns the full circle when every positivity
/// constraint is slack, and an empty union when none of the circle is
/// positive (possible only for s3 <= 0).
pub fn arc_feasible_set(s3: f64, q3: f64) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(3);
    arc_feasible_into(s3, q3, &mut out)?;
    Ok(out)
}

fn arc_feasible_into(s3: f64, q3: f64, out: &mut Vec<(f64, f64)>) -> Result<()> {
    out.clear();
    let limit = s3 * s3 / 3.0;
    if q3 - limit < -1e-12 * (1.0 + limit.abs()) {
        return Err(Error::EmptyFiber { s3, q3, limit });
    }
    let rho = (q3 - limit).max(0.0).sqrt();
    if rho <= 1e-14 * (1.0 + s3.abs()) {
        // zero-radius circle: the single point (s3/3, s3/3, s3/3)
        if s3 > 0.0 {
            out.push((0.0, TAU));
        }
        return Ok(());
    }
    // Coordinate i is positive iff cos(theta - c_i) > tau, an arc of
    // half-width gamma = acos(tau) around c_i. The three centers sit
    // exactly 2*pi/3 apart, so the intersection has a closed form: empty
    // for gamma <= 2*pi/3 (the farthest center is always >= 2*pi/3 away),
    // the full circle for gamma = pi, and otherwise three arcs of
    // half-width gamma - 2*pi/3 around the centers themselves.
    let tau = -s3 / (rho * SQRT_6);
    if tau <= -1.0 {
        out.push((0.0, TAU));
        return Ok(());
    }
    if tau >= 1.0 {
        return Ok(());
    }
    let half_width = tau.acos() - 2.0 * std::f64::consts::FRAC_PI_3;
    if half_width <= 0.0 {
        return Ok(());
    }
    for c in FIBER_ARC_CENTERS {
        let (lo, hi) = (c - half_width, c + half_width);
        // wrap into [0, 2*pi); half_width < pi/3, so an arc splits at most once
        if lo < 0.0 {
            out.push((0.0, hi));
            out.push((lo + TAU, TAU));
        } else if hi > TAU {
            out.push((lo, TAU));
            out.push((0.0, hi - TAU));
        } else {
            out.push((lo, hi));
        }
    }
    out.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    Ok(())
}

/// Deterministic starting point: one large coordinate, the rest equal,
/// solving both constraints with everything positive.
pub fn gibbs_initial_point(spec: &ManifoldSpec) -> Point {
    let n = spec.n;
    let t = 1.0 - ((spec.b - 1.0) / (n as f64 - 1.0)).sqrt();
    let mut x = vec![t; n];
    x[0] = n as f64 - (n as f64 - 1.0) * t;
    x
}

/// A single constraint-preserving chain.
pub struct GibbsChain {
    spec: ManifoldSpec,
    x: Vec<f64>,
    rng: Stream,
    arcs: Vec<(f64, f64)>,
}

impl GibbsChain {
    pub fn new(spec: &ManifoldSpec, rng: Stream) -> Result<Self> {
        if spec.n < 3 || spec.b <= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "gibbs chain needs n >= 3 and 1 < b < n, got n = {}, b = {}",
                spec.n, spec.b
            )));
        }
        Ok(GibbsChain {
            spec: *spec,
            x: gibbs_initial_point(spec),
            rng,
            arcs: Vec::with_capacity(3),
        })
    }

    pub fn state(&self) -> &[f64] {
        &self.x
    }

    /// One triple move: resample a random 3-subset uniformly on its
    /// feasible arc, leaving both global constraint sums untouched.
    pub fn step(&mut self) -> Result<()> {
        let n = self.x.len();
        let i = self.rng.random_range(0..n);
        let j = loop {
            let j = self.rng.random_range(0..n);
            if j != i {
                break j;
            }
        };
        let k = loop {
            let k = self.rng.random_range(0..n);
            if k != i && k != j {
                break k;
            }
        };
        let (xi, xj, xk) = (self.x[i], self.x[j], self.x[k]);
        let s3 = xi + xj + xk;
        let q3 = xi * xi + xj * xj + xk * xk;
        arc_feasible_into(s3, q3, &mut self.arcs)?;
        let total: f64 = self.arcs.iter().map(|(lo, hi)| hi - lo).sum();
        if !(total > 0.0) {
            return Err(Error::InternalState(format!(
                "empty feasible arc at s3 = {s3}, q3 = {q3}"
            )));
        }
        for _ in 0..100 {
            let mut u = self.rng.random::<f64>() * total;
            let mut theta = self.arcs[0].0;
            for &(lo, hi) in &self.arcs {
                let len = hi - lo;
                if u <= len {
                    theta = lo + u;
                    break;
                }
                u -= len;
            }
            let y = fiber_point(s3, q3, theta);
            // roundoff at an arc boundary can graze zero; redraw if so
            if y.iter().all(|&v| v > 0.0) {
                self.x[i] = y[0];
                self.x[j] = y[1];
                self.x[k] = y[2];
                return Ok(());
            }
        }
        Err(Error::InternalState(
            "could not draw a positive fiber point in 100 attempts".into(),
        ))
    }

    /// One sweep = n moves, then a projection through psi to cancel float
    /// drift in the constraint sums.
    pub fn sweep(&mut self) -> Result<()> {
        for _ in 0..self.x.len() {
            self.step()?;
        }
        psi_in_place(&mut self.x, &self.spec);
        Ok(())
    }
}

/// Run one chain and collect `count` states, `thin_sweeps` apart, after
/// `burn_in` sweeps.
pub fn sample_gibbs(
    spec: &ManifoldSpec,
    count: usize,
    thin_sweeps: usize,
    burn_in: usize,
    rng: Stream,
) -> Result<SampleBatch> {
    let points = chain_worker(spec, count, thin_sweeps, burn_in, rng)?;
    Ok(SampleBatch {
        accepts: points.len() as u64,
        proposals: points.len() as u64,
        points,
        spec: *spec,
        sampler_id: SamplerId::Gibbs,
        seed: 0,
        shell: None,
        gibbs_sweeps: Some(thin_sweeps as u32),
    })
}

/// Independent chains per worker, each burned in separately.
pub fn sample_gibbs_seeded(
    spec: &ManifoldSpec,
    count: usize,
    thin_sweeps: usize,
    burn_in: usize,
    seed: u64,
    threads: usize,
) -> Result<SampleBatch> {
    let partials = run_partitioned(count, threads, |worker, share| {
        if share == 0 {
            return Ok(Vec::new());
        }
        chain_worker(spec, share, thin_sweeps, burn_in, seed_stream(seed, worker))
    })?;
    let points: Vec<Point> = partials.into_iter().flatten().collect();
    Ok(SampleBatch {
        accepts: points.len() as u64,
        proposals: points.len() as u64,
        points,
        spec: *spec,
        sampler_id: SamplerId::Gibbs,
        seed,
        shell: None,
        gibbs_sweeps: Some(thin_sweeps as u32),
    })
}

fn chain_worker(
    spec: &ManifoldSpec,
    count: usize,
    thin_sweeps: usize,
    burn_in: usize,
    rng: Stream,
) -> Result<Vec<Point>> {
    let thin = thin_sweeps.max(1);
    let mut chain = GibbsChain::new(spec, rng)?;
    for _ in 0..burn_in {
        chain.sweep()?;
    }
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        for _ in 0..thin {
            chain.sweep()?;
        }
        points.push(chain.state().to_vec());
    }
    Ok(points)
}
