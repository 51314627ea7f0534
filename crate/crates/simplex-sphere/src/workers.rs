//! Scoped worker pool over independent sub-tasks.
//!
//! Workers share nothing but the immutable inputs; worker `i` derives its
//! RNG stream from `(seed, i)` at the call site, and results are merged in
//! worker order, so a one-thread run is exactly reproducible.

use crate::error::Result;

/// Deterministic split of `count` over `workers` (earlier workers take the
/// remainder).
pub(crate) fn split_counts(count: usize, workers: usize) -> Vec<usize> {
    let workers = workers.max(1);
    let base = count / workers;
    let rem = count % workers;
    (0..workers)
        .map(|i| base + usize::from(i < rem))
        .collect()
}

/// Run `job(worker_index, share)` on scoped threads; results in worker order.
pub(crate) fn run_partitioned<T, F>(count: usize, threads: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, usize) -> Result<T> + Sync,
{
    let shares = split_counts(count, threads);
    if shares.len() == 1 {
        return Ok(vec![job(0, shares[0])?]);
    }
    let mut slots: Vec<Option<Result<T>>> = Vec::new();
    slots.resize_with(shares.len(), || None);
    std::thread::scope(|scope| {
        for (i, (slot, share)) in slots.iter_mut().zip(&shares).enumerate() {
            let job = &job;
            scope.spawn(move || {
                *slot = Some(job(i as u64, *share));
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("worker completed"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_exact_and_deterministic() {
        assert_eq!(split_counts(10, 3), vec![4, 3, 3]);
        assert_eq!(split_counts(2, 4), vec![1, 1, 0, 0]);
        assert_eq!(split_counts(0, 2), vec![0, 0]);
        assert_eq!(split_counts(5, 1), vec![5]);
    }

    #[test]
    fn results_arrive_in_worker_order() {
        let out = run_partitioned(10, 4, |worker, share| Ok((worker, share))).unwrap();
        assert_eq!(out, vec![(0, 3), (1, 3), (2, 2), (3, 2)]);
    }
}
