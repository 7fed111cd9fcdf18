//! Trial-level data parallelism. With the `parallel` feature trials run on the
//! rayon pool; without it they run in order on the calling thread. Results
//! always come back indexed by trial, so aggregation order never depends on
//! scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `f(0), ..., f(trials - 1)`, possibly evaluated concurrently.
pub fn map_trials<T, F>(trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..trials).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_trials_sequential(trials, f)
    }
}

/// Same as [`map_trials`] but always on the calling thread.
pub fn map_trials_sequential<T, F>(trials: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..trials).map(f).collect()
}

/// Seed of trial `t` in a run seeded with `seed`.
#[inline]
pub fn trial_seed(seed: u64, t: u64) -> u64 {
    seed ^ t
}
