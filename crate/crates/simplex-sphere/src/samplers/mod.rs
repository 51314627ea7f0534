//! Three samplers targeting the uniform distribution on the constraint set:
//! exact rejection from the Gaussian sphere picture, product-law rejection
//! into the thick shell, and a constraint-preserving Gibbs chain.
//!
//! Parallel batch production follows one rule: worker `i` of a run seeded
//! with `seed` owns the stream `seed_stream(seed, i)` and produces its share
//! of the points independently; sub-batches are concatenated in worker
//! order. One worker therefore reproduces byte-identical output.

mod exact;
mod gibbs;
mod shell;

pub use exact::{exact_acceptance_probe, sample_exact, sample_exact_seeded};
pub use gibbs::{
    arc_feasible_set, fiber_point, gibbs_initial_point, sample_gibbs, sample_gibbs_seeded,
    GibbsChain, FIBER_ARC_CENTERS,
};
pub use shell::{
    sample_shell, sample_shell_seeded, sandwich_rate, shell_acceptance, AcceptanceEstimate,
};

pub(crate) use crate::workers::run_partitioned;

/// Number of proposals after which a rejection sampler with zero accepts
/// gives up: below ~1e-6 acceptance it would stall for minutes per point.
pub const INFEASIBLE_PROPOSALS: u64 = 1_000_000;
