//! Data-parallel plumbing.
//!
//! Heavy inner loops (path enumeration, Monte Carlo chunks, per-stock
//! traversals, merge targets) are expressed as an order-preserving indexed
//! map. With the `parallel` feature the map runs on rayon; without it the
//! same code runs sequentially. Work is always partitioned by a fixed rule
//! that does not depend on thread count, and reductions walk the collected
//! partials in index order, so results are bit-identical in both modes and
//! for any pool size.

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}
