//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the loops below run on the rayon pool; without
//! it they are plain iterators. Every helper splits work in a way that does
//! not depend on the number of threads, so results are bitwise identical in
//! both builds and for any pool size.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Block length for reductions. Partial sums are formed per block and then
/// added in block order.
const REDUCE_BLOCK: usize = 2048;

/// Minimum items per rayon task for element and node loops.
#[cfg(feature = "parallel")]
const MIN_LEN: usize = 512;

/// Fills `out[i] = f(i)`.
pub fn fill<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    out.par_iter_mut()
        .with_min_len(MIN_LEN)
        .enumerate()
        .for_each(|(i, o)| *o = f(i));
    #[cfg(not(feature = "parallel"))]
    out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
}

/// Calls `f(i, &mut out[i])` for every element.
pub fn for_each_mut<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    out.par_iter_mut()
        .with_min_len(MIN_LEN)
        .enumerate()
        .for_each(|(i, o)| f(i, o));
    #[cfg(not(feature = "parallel"))]
    out.iter_mut().enumerate().for_each(|(i, o)| f(i, o));
}

/// Collects `f(i)` for `i in 0..n`.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().with_min_len(MIN_LEN).map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Runs two closures, concurrently when the pool allows it.
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    {
        rayon::join(a, b)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (a(), b())
    }
}

/// Deterministic sum of `f(i)` over `0..n`.
pub fn sum_by<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let blocks = n.div_ceil(REDUCE_BLOCK);
    let block_sum = |b: usize| {
        let lo = b * REDUCE_BLOCK;
        let hi = (lo + REDUCE_BLOCK).min(n);
        (lo..hi).fold(0.0, |acc, i| acc + f(i))
    };
    #[cfg(feature = "parallel")]
    let partial: Vec<f64> = (0..blocks).into_par_iter().map(block_sum).collect();
    #[cfg(not(feature = "parallel"))]
    let partial: Vec<f64> = (0..blocks).map(block_sum).collect();
    partial.into_iter().fold(0.0, |acc, s| acc + s)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum_by(a.len(), |i| a[i] * b[i])
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for_each_mut(y, |i, yi| *yi += alpha * x[i]);
}

/// Number of worker threads the helpers will use.
pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
