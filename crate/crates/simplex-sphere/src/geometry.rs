//! Vector statistics, the standardization maps, and membership predicates
//! for the constraint set and its thickened shell.
//!
//! The constraint set is
//!
//! ```text
//! K = { x in R_+^n : sum x_i = n, sum x_i^2 = n b }
//!   = { x : mu(x) = 1, sigma(x) = sqrt(b - 1), all x_i > 0 }
//! ```
//!
//! and the shell is the positively tilted thickening
//! `K^eps = { x > 0 : eps < mu(x) - 1 < 2 eps, eps < mu2(x) - b < b eps }`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A point is a bare coordinate vector; all structure lives in the spec.
pub type Point = Vec<f64>;

/// Relative scale below which a vector counts as constant and the
/// standardization map returns zero instead of dividing by sigma.
const CONSTANT_VECTOR_TOL: f64 = 1e-12;

/// The pair (n, b) with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub n: usize,
    pub b: f64,
    /// sqrt(b - 1): the standard deviation of every point on the set.
    pub b_prime: f64,
    /// 1 / b_prime: the positivity margin on the centered sphere.
    pub d: f64,
}

impl ManifoldSpec {
    /// The set is non-empty exactly for n >= 2 and 1 <= b < n.
    pub fn new(n: usize, b: f64) -> Result<Self> {
        if n < 2 || !b.is_finite() || b < 1.0 || b >= n as f64 {
            return Err(Error::InvalidSpec { n, b });
        }
        let b_prime = (b - 1.0).sqrt();
        Ok(ManifoldSpec {
            n,
            b,
            b_prime,
            d: 1.0 / b_prime,
        })
    }

    /// sqrt(b - 2), the localization scale; present only for b > 2.
    pub fn q(&self) -> Option<f64> {
        (self.b > 2.0).then(|| (self.b - 2.0).sqrt())
    }

    /// Default membership tolerance on the extensive constraint sums
    /// `sum x_i` and `sum x_i^2` (they scale with n, so the tolerance does).
    pub fn default_tol(&self) -> f64 {
        1e-9 * self.n as f64
    }
}

/// The thickened set K^eps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSpec {
    pub n: usize,
    pub b: f64,
    pub eps: f64,
}

impl ShellSpec {
    pub fn new(n: usize, b: f64, eps: f64) -> Result<Self> {
        ManifoldSpec::new(n, b)?;
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::InvalidShell { eps });
        }
        Ok(ShellSpec { n, b, eps })
    }

    /// Strict shell membership: mean in (1+eps, 1+2eps), mean of squares in
    /// (b+eps, b+b*eps), all coordinates positive.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.n || x.iter().any(|&v| v <= 0.0) {
            return false;
        }
        let st = match stats(x) {
            Ok(s) => s,
            Err(_) => return false,
        };
        let (e, b) = (self.eps, self.b);
        st.mu - 1.0 > e && st.mu - 1.0 < 2.0 * e && st.mu2 - b > e && st.mu2 - b < b * e
    }
}

/// One-pass mean / mean-of-squares / minimum, with the standard deviation
/// from a second centered pass so it survives b near 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorStats {
    pub mu: f64,
    pub mu2: f64,
    pub sigma: f64,
    pub min_coord: f64,
}

pub fn stats(x: &[f64]) -> Result<VectorStats> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("stats: empty vector".into()));
    }
    let n = x.len() as f64;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut min = f64::INFINITY;
    for &v in x {
        sum += v;
        sumsq += v * v;
        if v < min {
            min = v;
        }
    }
    let mu = sum / n;
    let mu2 = sumsq / n;
    // Centered pass: sqrt(mean((x - mu)^2)) instead of sqrt(mu2 - mu^2),
    // which cancels catastrophically when the spread is small.
    let mut cen = 0.0;
    for &v in x {
        let d = v - mu;
        cen += d * d;
    }
    Ok(VectorStats {
        mu,
        mu2,
        sigma: (cen / n).sqrt(),
        min_coord: min,
    })
}

/// Standardize onto the centered unit sphere: `(x - mu 1)/sigma`, or the
/// zero vector when x is (numerically) constant.
pub fn phi(x: &[f64]) -> Point {
    let st = match stats(x) {
        Ok(s) => s,
        Err(_) => return Vec::new(),
    };
    if st.sigma < CONSTANT_VECTOR_TOL * (1.0 + st.mu.abs()) {
        return vec![0.0; x.len()];
    }
    x.iter().map(|&v| (v - st.mu) / st.sigma).collect()
}

/// Project onto the constraint set: `b' phi(x) + 1`. Identity on K;
/// in general the output has mean 1 and mean of squares b up to roundoff
/// (unless phi hit the zero branch, in which case it is the all-ones point).
pub fn psi(x: &[f64], spec: &ManifoldSpec) -> Point {
    let mut out = phi(x);
    for v in &mut out {
        *v = spec.b_prime * *v + 1.0;
    }
    out
}

/// In-place variant used by the samplers' hot loops.
pub(crate) fn psi_in_place(x: &mut [f64], spec: &ManifoldSpec) {
    let st = stats(x).expect("psi on non-empty vector");
    if st.sigma < CONSTANT_VECTOR_TOL * (1.0 + st.mu.abs()) {
        x.fill(1.0);
        return;
    }
    let scale = spec.b_prime / st.sigma;
    for v in x {
        *v = (*v - st.mu) * scale + 1.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    OnK,
    InShell,
    Outside,
}

/// Classify a point against K (within `tol` on the two constraint *sums*)
/// and, when given, against the strict shell inequalities.
pub fn membership(
    x: &[f64],
    spec: &ManifoldSpec,
    shell: Option<&ShellSpec>,
    tol: f64,
) -> Membership {
    let n = spec.n as f64;
    if x.len() == spec.n && x.iter().all(|&v| v > 0.0) {
        let sum: f64 = x.iter().sum();
        let sumsq: f64 = x.iter().map(|&v| v * v).sum();
        if (sum - n).abs() <= tol && (sumsq - n * spec.b).abs() <= tol {
            return Membership::OnK;
        }
    }
    if let Some(sh) = shell {
        if sh.contains(x) {
            return Membership::InShell;
        }
    }
    Membership::Outside
}
