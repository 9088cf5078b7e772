//! Deterministic worker-pool helpers.
//!
//! Reductions over quadrature points are partitioned into fixed-size index
//! blocks and the per-block partial sums are combined in block order, so the
//! floating-point operation sequence — and therefore the result, bit for
//! bit — is independent of how many workers execute the blocks.

use rayon::prelude::*;

/// Fixed block length for quadrature-index partitions.
pub const QUAD_BLOCK: usize = 64;

/// A rayon pool with an explicit worker count.
pub struct WorkerPool {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl WorkerPool {
    pub fn new(workers: usize) -> Self {
        let workers = workers.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("failed to build worker pool");
        Self { pool, workers }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        self.pool.install(op)
    }
}

impl Default for WorkerPool {
    fn default() -> Self {
        Self::new(1)
    }
}

/// Map all indices `0..n` in parallel, preserving order.
pub fn ordered_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

/// Parallel fallible map preserving order; the error of the smallest failing
/// index wins so diagnostics are reproducible.
pub fn ordered_try_map<T: Send, E: Send>(
    n: usize,
    f: impl Fn(usize) -> Result<T, E> + Sync + Send,
) -> Result<Vec<T>, E> {
    let results: Vec<Result<T, E>> = (0..n).into_par_iter().map(f).collect();
    let mut out = Vec::with_capacity(n);
    for r in results {
        out.push(r?);
    }
    Ok(out)
}

/// Sum per-block partial results of `block(range)` over `0..n` in block
/// order. `block` must itself accumulate sequentially over its range.
pub fn blocked_sum<T, F>(n: usize, zero: T, block: F, add: impl Fn(&mut T, T)) -> T
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    let blocks = n.div_ceil(QUAD_BLOCK);
    if blocks <= 1 {
        let mut total = zero;
        add(&mut total, block(0..n));
        return total;
    }
    let partials: Vec<T> = (0..blocks)
        .into_par_iter()
        .map(|b| block(b * QUAD_BLOCK..((b + 1) * QUAD_BLOCK).min(n)))
        .collect();
    let mut total = zero;
    for p in partials {
        add(&mut total, p);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocked_sum_is_worker_count_invariant() {
        let n = 1000;
        let values: Vec<f64> = (0..n).map(|i| ((i * 2654435761) % 977) as f64 / 977.0).collect();
        let run = |workers: usize| {
            WorkerPool::new(workers).install(|| {
                blocked_sum(
                    n,
                    0.0f64,
                    |r| r.map(|i| values[i]).fold(0.0, |a, b| a + b),
                    |acc, p| *acc += p,
                )
            })
        };
        let s1 = run(1);
        let s2 = run(2);
        let s8 = run(8);
        assert_eq!(s1.to_bits(), s2.to_bits());
        assert_eq!(s1.to_bits(), s8.to_bits());
    }
}
