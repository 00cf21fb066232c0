//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the work items run on the rayon pool;
//! without it they run in order on the calling thread. Partial results are
//! always combined in chunk order, and chunk boundaries depend only on the
//! problem size, so the floating-point result does not depend on the thread
//! count or on whether the feature is enabled.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Upper bound on the number of partial accumulators in [`sum_into`].
const MAX_CHUNKS: usize = 64;

/// Whether this build runs the helpers on the rayon pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

fn chunk_ranges(items: usize, min_chunk: usize) -> Vec<Range<usize>> {
    if items == 0 {
        return Vec::new();
    }
    let chunk = items.div_ceil(MAX_CHUNKS).max(min_chunk.max(1));
    (0..items)
        .step_by(chunk)
        .map(|start| start..(start + chunk).min(items))
        .collect()
}

/// Sums per-chunk contributions into a vector of length `len`.
///
/// `work(range, acc)` adds the contribution of items `range` into a zeroed
/// accumulator. Accumulators are added together in chunk order.
pub fn sum_into<F>(items: usize, len: usize, min_chunk: usize, work: F) -> Vec<f64>
where
    F: Fn(Range<usize>, &mut [f64]) + Sync + Send,
{
    let ranges = chunk_ranges(items, min_chunk);
    if ranges.len() <= 1 {
        let mut acc = vec![0.0; len];
        if let Some(r) = ranges.into_iter().next() {
            work(r, &mut acc);
        }
        return acc;
    }

    let run = |r: Range<usize>| {
        let mut acc = vec![0.0; len];
        work(r, &mut acc);
        acc
    };

    #[cfg(feature = "parallel")]
    let partials: Vec<Vec<f64>> = ranges.into_par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<Vec<f64>> = ranges.into_iter().map(run).collect();

    let mut iter = partials.into_iter();
    let mut total = iter.next().unwrap_or_else(|| vec![0.0; len]);
    for part in iter {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// Maps `f` over `0..items`, preserving order.
pub fn map_indices<T, F>(items: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..items).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..items).map(f).collect()
    }
}

/// Applies `f(index, value)` to every element of `out`, in parallel chunks
/// of at least `min_chunk` elements.
pub fn fill_indexed<F>(out: &mut [f64], min_chunk: usize, f: F)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunk = out.len().div_ceil(MAX_CHUNKS).max(min_chunk.max(1));
    #[cfg(feature = "parallel")]
    out.par_chunks_mut(chunk)
        .enumerate()
        .for_each(|(c, slice)| {
            let base = c * chunk;
            for (i, v) in slice.iter_mut().enumerate() {
                *v = f(base + i);
            }
        });
    #[cfg(not(feature = "parallel"))]
    out.chunks_mut(chunk).enumerate().for_each(|(c, slice)| {
        let base = c * chunk;
        for (i, v) in slice.iter_mut().enumerate() {
            *v = f(base + i);
        }
    });
}
