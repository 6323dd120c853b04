//! A fixed-size worker pool whose results never depend on its size.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

/// Environment variable read when no explicit worker count is given.
pub const WORKERS_ENV: &str = "LDPGOF_WORKERS";

/// Explicit request, then the environment, then the machine's parallelism.
pub fn resolve_workers(requested: Option<usize>) -> Result<usize> {
    if let Some(w) = requested {
        return check(w);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(text) => {
            let w = text
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("{WORKERS_ENV}={text:?} is not a worker count")))?;
            check(w)
        }
        Err(_) => Ok(std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)),
    }
}

fn check(w: usize) -> Result<usize> {
    if w == 0 {
        Err(Error::Config("worker count must be positive".into()))
    } else {
        Ok(w)
    }
}

pub struct Executor {
    pool: ThreadPool,
    workers: usize,
}

impl Executor {
    pub fn new(workers: usize) -> Result<Self> {
        let workers = check(workers)?;
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
        Ok(Executor { pool, workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// `f(0), …, f(count − 1)` in index order.
    pub fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }

    pub fn try_map<T, F>(&self, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        self.map(count, f).into_iter().collect()
    }

    /// Run `f` with this pool as the ambient rayon pool.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }
}
