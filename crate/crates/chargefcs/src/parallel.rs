//! Deterministic fan-out over sample ranges.
//!
//! Work is cut into fixed-size chunks whose boundaries depend only on the sample
//! count, never on the thread count. Chunk results come back in chunk order and are
//! folded sequentially, so floating-point reductions are reproducible too.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{CliError, CliResult};

/// Samples per chunk.
pub const CHUNK: u64 = 4096;

/// Splits `0..n` into consecutive chunks of at most `chunk` indices.
pub fn chunks(n: u64, chunk: u64) -> Vec<Range<u64>> {
    let chunk = chunk.max(1);
    (0..n.div_ceil(chunk)).map(|i| i * chunk..((i + 1) * chunk).min(n)).collect()
}

/// Worker pool with a fixed thread count (0 lets rayon choose).
pub struct Pool {
    inner: rayon::ThreadPool,
}

impl Pool {
    pub fn new(threads: usize) -> CliResult<Self> {
        let inner = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
        Ok(Pool { inner })
    }

    pub fn threads(&self) -> usize {
        self.inner.current_num_threads()
    }

    /// Runs `f` on every chunk of `0..n` and returns the results in chunk order.
    pub fn map_chunks<T, F>(&self, n: u64, chunk: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<u64>) -> T + Sync,
    {
        let parts = chunks(n, chunk);
        self.inner.install(|| parts.into_par_iter().map(&f).collect())
    }

    /// Ordered parallel map over arbitrary items.
    pub fn map<I, T, F>(&self, items: Vec<I>, f: F) -> Vec<T>
    where
        I: Send,
        T: Send,
        F: Fn(I) -> T + Sync,
    {
        self.inner.install(|| items.into_par_iter().map(&f).collect())
    }

    /// Like [`Pool::map`] for fallible work; the first error in item order wins.
    pub fn try_map<I, T, F>(&self, items: Vec<I>, f: F) -> CliResult<Vec<T>>
    where
        I: Send,
        T: Send,
        F: Fn(I) -> CliResult<T> + Sync,
    {
        self.map(items, f).into_iter().collect()
    }
}
