//! Thin indirection over rayon so the crate builds without it.
//!
//! With the `parallel` feature (default) the mappers fan out over the rayon
//! global pool; without it they run sequentially. Output order matches input
//! order either way, which keeps every downstream artifact deterministic.

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    // Individual items are cheap; coarse splits keep the fork overhead from
    // dominating small workloads.
    items.into_par_iter().with_min_len(4).map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Always-sequential variant, kept for benchmarking against the parallel path.
pub(crate) fn map_collect_seq<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}
