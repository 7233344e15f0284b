use physiosel_core::Executor;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{CliError, Result};

/// Thread-pool executor; results come back in index order.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    /// `None` uses every available core.
    pub fn new(threads: Option<usize>) -> Result<Self> {
        let mut b = ThreadPoolBuilder::new();
        if let Some(t) = threads {
            if t == 0 {
                return Err(CliError::Config("--threads must be at least 1".into()));
            }
            b = b.num_threads(t);
        }
        let pool = b.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        Ok(RayonExecutor { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_keep_index_order() {
        let e = RayonExecutor::new(Some(3)).unwrap();
        assert_eq!(e.map(100, |i| i * i), (0..100).map(|i| i * i).collect::<Vec<_>>());
        assert!(RayonExecutor::new(Some(0)).is_err());
    }
}
