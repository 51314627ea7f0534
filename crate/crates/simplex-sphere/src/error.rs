use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid manifold spec: n = {n}, b = {b}; the set is non-empty only for n >= 2 and 1 <= b < n")]
    InvalidSpec { n: usize, b: f64 },

    #[error("invalid shell: eps = {eps}; need 0 < eps < 1/2")]
    InvalidShell { eps: f64 },

    #[error("inadmissible tilt parameters r = {r}, s = {s}: the density only normalizes for r > 0, or r = 0 with s > 0")]
    InadmissibleParams { r: f64, s: f64 },

    #[error("b = {0} out of range for moment matching: need 1 < b <= 2 (for b > 2 the marginal limit is Exp(1) and no tilt matches)")]
    OutOfRange(f64),

    #[error("b = {0} is too close to 1: the matching tilt needs r beyond ~1e8, where f64 moment evaluation degrades")]
    IllConditioned(f64),

    #[error("moment solver did not converge for b = {b}: final residual {residual:.3e}")]
    NonConvergence { b: f64, residual: f64 },

    #[error("closed-form and quadrature moment routes disagree at r = {r}, s = {s}: max relative difference {diff:.3e}")]
    MomentMismatch { r: f64, s: f64, diff: f64 },

    #[error("rejection sampling looks infeasible: 0 accepts in {proposals} proposals (estimated acceptance < 1e-6); use the gibbs sampler instead")]
    InfeasibleRejection { proposals: u64 },

    #[error("empty fiber: q3 = {q3} < s3^2/3 = {limit:.6} (s3 = {s3})")]
    EmptyFiber { s3: f64, q3: f64, limit: f64 },

    #[error("internal state error: {0}")]
    InternalState(String),

    #[error("degenerate covariance: determinant {0:.3e} below 1e-12")]
    DegenerateCovariance(f64),

    #[error("inconclusive estimate: {side} rejection produced 0 accepts in {proposals} proposals")]
    Inconclusive { side: &'static str, proposals: u64 },

    #[error("malformed batch file: {0}")]
    BadBatchFile(String),

    #[error("batch point {index} fails membership re-verification at load")]
    BatchMembership { index: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
