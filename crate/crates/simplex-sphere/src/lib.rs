//! Sampling and verification for the uniform distribution on the
//! intersection of the positive simplex `{sum x_i = n}` with the sphere
//! `{sum x_i^2 = n b}`.
//!
//! The crate provides:
//!
//! - [`geometry`]: the constraint set, its thickened shell, vector
//!   statistics, and the standardization maps between the set and the
//!   centered unit sphere;
//! - [`tilted`]: the half-line density family `exp(-r x^2 - s x)`, with
//!   dual-route moments (closed form vs adaptive quadrature), CDF, exact
//!   sampling, and the moment-matching solver for the marginal limit law;
//! - [`samplers`]: exact rejection, shell-conditioned product rejection,
//!   and a constraint-preserving Gibbs chain, all reproducible from
//!   (seed, worker) stream derivations;
//! - [`verify`]: Kolmogorov-Smirnov machinery, moment and extreme-value
//!   reports, a local-limit-theorem check, and the product-vs-uniform
//!   sandwich test on the shell;
//! - [`harness`]: one driver per headline claim (marginal convergence and
//!   its rate, the phase transition at b = 2, localization for b > 2).

pub mod batch;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod quad;
pub mod rng;
pub mod samplers;
pub mod special;
pub mod tilted;
pub mod verify;
mod workers;

pub use error::{Error, Result};
