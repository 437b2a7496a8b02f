//! Data-parallel helpers with a sequential fallback.
//!
//! The `parallel` feature swaps rayon in behind the same entry points. All
//! reductions run over fixed-size blocks folded in index order, so results
//! are bit-identical whether the work ran on one thread or many, and
//! identical with the feature disabled.

use num_complex::Complex64;

/// Fixed block size for chunked reductions. Not tied to the thread count;
/// changing it would change rounding, so it is a constant.
pub const BLOCK: usize = 1024;

#[cfg(feature = "parallel")]
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

fn block_ranges(n: usize) -> Vec<(usize, usize)> {
    (0..n.div_ceil(BLOCK))
        .map(|k| (k * BLOCK, ((k + 1) * BLOCK).min(n)))
        .collect()
}

/// Fold partial results pairwise in index order. Deterministic for any
/// associativity-sensitive payload (floating point sums in particular).
pub fn pairwise_fold<T, F>(mut parts: Vec<T>, combine: F, empty: T) -> T
where
    F: Fn(T, T) -> T,
{
    if parts.is_empty() {
        return empty;
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(combine(a, b)),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop().unwrap()
}

/// Sum f(i) over 0..n: per-block sequential accumulation in index order,
/// blocks combined pairwise. Parallelism only distributes whole blocks.
pub fn sum_f64<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let ranges = block_ranges(n);
    let partials = map_collect(ranges.len(), |k| {
        let (lo, hi) = ranges[k];
        let mut acc = 0.0;
        for i in lo..hi {
            acc += f(i);
        }
        acc
    });
    pairwise_fold(partials, |a, b| a + b, 0.0)
}

pub fn sum_complex<F>(n: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let ranges = block_ranges(n);
    let partials = map_collect(ranges.len(), |k| {
        let (lo, hi) = ranges[k];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in lo..hi {
            acc += f(i);
        }
        acc
    });
    pairwise_fold(partials, |a, b| a + b, Complex64::new(0.0, 0.0))
}

/// Sequential reference for the same blocked sum; used by the benches and
/// as a cross-check that parallel scheduling does not change results.
pub fn sum_f64_seq<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64,
{
    let partials = block_ranges(n)
        .into_iter()
        .map(|(lo, hi)| {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            acc
        })
        .collect();
    pairwise_fold(partials, |a, b| a + b, 0.0)
}

/// Max over f(i), folded deterministically (f64 max is associative, this
/// just keeps the same blocked shape as the sums).
pub fn max_f64<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let ranges = block_ranges(n);
    let partials = map_collect(ranges.len(), |k| {
        let (lo, hi) = ranges[k];
        let mut acc = f64::NEG_INFINITY;
        for i in lo..hi {
            acc = acc.max(f(i));
        }
        acc
    });
    pairwise_fold(partials, f64::max, f64::NEG_INFINITY)
}

/// Cap the worker pool. With the sequential fallback this is a no-op;
/// results never depend on it either way.
#[cfg(feature = "parallel")]
pub fn configure_threads(n: usize) -> Result<(), String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_n: usize) -> Result<(), String> {
    Ok(())
}

/// Kahan compensated accumulator, for the N^2 cancellation in the Warnock
/// double sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// SplitMix64: tiny deterministic generator for control point sets and
/// mutation trials. Spelled out here so reports never drift with an
/// external RNG crate's algorithm choices.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, bound) by rejection; bound must be nonzero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }
}
