//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper takes an [`Exec`] so callers (and the benchmark suite) can
//! pick the strategy explicitly. Reductions are computed as fixed-size chunk
//! partials combined in index order, so parallel and sequential runs agree
//! bit for bit.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for lattice-sized loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is on; identical to
    /// `Sequential` otherwise.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Partial-sum granularity for deterministic reductions.
pub const REDUCE_CHUNK: usize = 4096;

/// Calls `f(chunk_index, chunk)` for consecutive `chunk_len` pieces of `data`.
pub fn for_each_chunk_mut<T, F>(exec: Exec, data: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    assert!(chunk_len > 0);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        data.par_chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = exec;
    data.chunks_mut(chunk_len)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}

/// Calls `f(i, &mut a[i], &b[i])` element-wise.
pub fn zip_apply<A, B, F>(exec: Exec, a: &mut [A], b: &[B], f: F)
where
    A: Send,
    B: Sync,
    F: Fn(usize, &mut A, &B) + Sync + Send,
{
    assert_eq!(a.len(), b.len());
    for_each_chunk_mut(exec, a, REDUCE_CHUNK, |ci, chunk| {
        let base = ci * REDUCE_CHUNK;
        for (j, x) in chunk.iter_mut().enumerate() {
            f(base + j, x, &b[base + j]);
        }
    });
}

/// Deterministic sum of `f(range)` over `0..len` split in `REDUCE_CHUNK` pieces.
pub fn sum_ranges<F>(exec: Exec, len: usize, f: F) -> f64
where
    F: Fn(Range<usize>) -> f64 + Sync + Send,
{
    let pieces = len.div_ceil(REDUCE_CHUNK);
    let partial = map_indices(exec, pieces, |p| {
        let start = p * REDUCE_CHUNK;
        f(start..(start + REDUCE_CHUNK).min(len))
    });
    partial.into_iter().sum()
}

/// Deterministic maximum of `f(range)` over `0..len`.
pub fn max_ranges<F>(exec: Exec, len: usize, f: F) -> f64
where
    F: Fn(Range<usize>) -> f64 + Sync + Send,
{
    let pieces = len.div_ceil(REDUCE_CHUNK);
    map_indices(exec, pieces, |p| {
        let start = p * REDUCE_CHUNK;
        f(start..(start + REDUCE_CHUNK).min(len))
    })
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max)
}

/// Ordered `(0..count).map(f).collect()`.
pub fn map_indices<R, F>(exec: Exec, count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..count).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reductions_agree_across_strategies() {
        let data: Vec<f64> = (0..100_003).map(|i| ((i as f64) * 0.37).sin()).collect();
        let f = |r: Range<usize>| data[r].iter().sum::<f64>();
        let seq = sum_ranges(Exec::Sequential, data.len(), f);
        let par = sum_ranges(Exec::Parallel, data.len(), f);
        assert_eq!(seq.to_bits(), par.to_bits());
        let m = max_ranges(Exec::Parallel, data.len(), |r| {
            data[r].iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        });
        assert!(m <= 1.0 && m > 0.99);
    }

    #[test]
    fn chunks_visit_everything_once() {
        let mut v = vec![0usize; 1000];
        for_each_chunk_mut(Exec::Parallel, &mut v, 7, |ci, c| {
            for (j, x) in c.iter_mut().enumerate() {
                *x += ci * 7 + j;
            }
        });
        assert!(v.iter().enumerate().all(|(i, &x)| x == i));
    }
}
