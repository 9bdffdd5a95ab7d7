use gmseries::experiments::GridExecutor;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{CliError, CliResult};

/// Evaluates grid points on a rayon pool of fixed size.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    /// `jobs = 0` uses every available core.
    pub fn new(jobs: usize) -> CliResult<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::config(format!("cannot start worker pool: {e}")))?;
        Ok(RayonExecutor { pool })
    }
}

impl GridExecutor for RayonExecutor {
    fn map<T, F>(&self, grid: &[u64], f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Send + Sync,
    {
        self.pool.install(|| grid.par_iter().map(|&n| f(n)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_grid_order() {
        let exec = RayonExecutor::new(4).unwrap();
        let grid: Vec<u64> = (1..200).collect();
        assert_eq!(exec.map(&grid, |n| n * n), grid.iter().map(|n| n * n).collect::<Vec<_>>());
    }
}
