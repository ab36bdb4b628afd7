use entire_core::region::NodeMapper;
use rayon::prelude::*;

use crate::error::CliError;

/// Evaluates raster nodes on a rayon pool. Results come back in index order,
/// so the worker count never changes an outcome.
pub struct RayonMapper {
    pool: rayon::ThreadPool,
}

impl RayonMapper {
    /// `None` uses the machine's available parallelism.
    pub fn new(workers: Option<usize>) -> Result<Self, CliError> {
        if workers == Some(0) {
            return Err(CliError::BadArgs("--workers must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.unwrap_or(0))
            .build()
            .map_err(|e| CliError::BadArgs(format!("cannot start worker pool: {e}")))?;
        Ok(RayonMapper { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl NodeMapper for RayonMapper {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use entire_core::region::Sequential;

    #[test]
    fn matches_sequential_order() {
        let square = |i: usize| i * i;
        let par = RayonMapper::new(Some(4)).unwrap();
        assert_eq!(par.workers(), 4);
        assert_eq!(par.map(1000, square), Sequential.map(1000, square));
        assert!(RayonMapper::new(Some(0)).is_err());
    }
}
