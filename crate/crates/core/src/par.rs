//! Index-parallel map with a sequential fallback.
//!
//! Every reduction in the crate collects per-item values through
//! [`map_range`] and then sums them in index order, so results are
//! bit-identical with and without the `parallel` feature and for any
//! thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Ranges shorter than this run on the calling thread.
#[cfg(feature = "parallel")]
const PARALLEL_MIN_LEN: usize = 256;

/// `(0..n).map(f).collect()`, parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub(crate) fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if n < PARALLEL_MIN_LEN {
        return (0..n).map(f).collect();
    }
    (0..n).into_par_iter().with_min_len(PARALLEL_MIN_LEN / 4).map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Sum of `f(i)` for `i in 0..n`, accumulated in index order.
pub(crate) fn sum_range<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_range(n, f).into_iter().sum()
}
