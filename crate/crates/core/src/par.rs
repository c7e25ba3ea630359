//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) these fan out over rayon's global
//! pool; without it they are plain sequential loops. Every helper assigns
//! one output slot per index, so results never depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many outputs the parallel path is not worth the fork/join.
#[cfg(feature = "parallel")]
const MIN_PARALLEL_LEN: usize = 64;

/// `(0..len).map(f).collect()`, parallel when enabled.
pub fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if len >= MIN_PARALLEL_LEN {
            return (0..len)
                .into_par_iter()
                .with_min_len(MIN_PARALLEL_LEN / 4)
                .map(f)
                .collect();
        }
    }
    (0..len).map(f).collect()
}

/// `items.iter().map(f).collect()`, parallel when enabled. Used for coarse
/// work items (dimensions, test cases) so there is no minimum length.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Runs `f` with all library parallelism confined to the calling thread.
///
/// Timing code uses this so that measured scaling reflects the algorithm and
/// not the thread pool.
pub fn single_threaded<R, F>(f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(1).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        f()
    }
}

/// Whether the crate was built with rayon support.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
