//! Execution strategy for the data-parallel inner loops.
//!
//! Every bulk loop in the crate (superposition passes, per-point closure
//! checks, equalizer sweeps) funnels through the helpers here so that the
//! sequential and the rayon-backed paths stay interchangeable. Without the
//! `parallel` feature both modes run sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a bulk computation is scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Fan out over the rayon thread pool. Falls back to sequential when the
    /// crate is built without the `parallel` feature.
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_enabled(mode: ExecMode) -> bool {
    mode == ExecMode::Parallel
}

/// Map `0..len` and collect the results in index order.
pub(crate) fn map_indices<T, F>(mode: ExecMode, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled(mode) {
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..len).map(f).collect()
}

/// Fold `0..len` into per-worker accumulators and merge them. The merge must
/// be order-independent (set union, conjunction, bitwise and) so that the
/// result does not depend on the schedule.
pub(crate) fn fold_indices<L, M, F, G>(mode: ExecMode, len: usize, make: M, fold: F, merge: G) -> L
where
    L: Send,
    M: Fn() -> L + Sync + Send,
    F: Fn(L, usize) -> L + Sync + Send,
    G: Fn(L, L) -> L + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled(mode) {
        return (0..len)
            .into_par_iter()
            .fold(&make, &fold)
            .reduce(&make, &merge);
    }
    let _ = mode;
    let _ = merge;
    (0..len).fold(make(), fold)
}

/// True iff the predicate holds on every index in `0..len`.
pub(crate) fn all_indices<F>(mode: ExecMode, len: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled(mode) {
        return (0..len).into_par_iter().all(pred);
    }
    let _ = mode;
    (0..len).all(pred)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            let v = map_indices(mode, 10, |i| i * i);
            assert_eq!(v, vec![0, 1, 4, 9, 16, 25, 36, 49, 64, 81]);
            let sum = fold_indices(mode, 100, || 0usize, |acc, i| acc + i, |a, b| a + b);
            assert_eq!(sum, 4950);
            assert!(all_indices(mode, 50, |i| i < 50));
            assert!(!all_indices(mode, 50, |i| i < 49));
        }
    }
}
