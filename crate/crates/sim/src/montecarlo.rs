//! Deterministic trial-parallel Monte Carlo.
//!
//! Trials are grouped into fixed chunks. Each chunk folds its trials in
//! order into a fresh accumulator and the chunk accumulators are merged in
//! chunk order, so results do not depend on the worker count.

use anyhow::{Context, Result};
use rayon::prelude::*;

/// Trials per chunk. Part of the reduction order, so changing it changes
/// the low bits of every average.
pub const CHUNK: u64 = 32;

pub struct Runner {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl Runner {
    /// `None` uses every available core.
    pub fn new(workers: Option<usize>) -> Result<Self> {
        let workers = workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .context("building worker pool")?;
        Ok(Self { pool, workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Runs `trial(acc, index)` for every index in `0..trials` and merges the
    /// chunk accumulators into `init()` in chunk order.
    pub fn run<A, I, T, M>(&self, trials: u64, init: I, trial: T, merge: M) -> Result<A>
    where
        A: Send,
        I: Fn() -> A + Sync,
        T: Fn(&mut A, u64) -> Result<()> + Sync,
        M: Fn(&mut A, A),
    {
        let chunks: Vec<(u64, u64)> = (0..trials.div_ceil(CHUNK))
            .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(trials)))
            .collect();
        let mut total = init();
        // Bounded batches keep at most a few accumulators alive per worker.
        for batch in chunks.chunks(self.workers * 2) {
            let done: Vec<Result<A>> = self.pool.install(|| {
                batch
                    .par_iter()
                    .map(|&(start, end)| {
                        let mut acc = init();
                        for t in start..end {
                            trial(&mut acc, t).with_context(|| format!("trial {t}"))?;
                        }
                        Ok(acc)
                    })
                    .collect()
            });
            for acc in done {
                merge(&mut total, acc?);
            }
        }
        Ok(total)
    }
}
