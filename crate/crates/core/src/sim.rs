use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::grid::{make_time_grid, TimeGrid};

/// Parameters of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub horizon: f64,
    pub step: f64,
    pub x0: Vec<f64>,
    pub n_paths: usize,
    pub master_seed: u64,
    pub n_workers: usize,
    pub record_trajectory: bool,
}

impl SimConfig {
    pub fn new(horizon: f64, step: f64, x0: Vec<f64>, n_paths: usize, master_seed: u64) -> Self {
        SimConfig {
            horizon,
            step,
            x0,
            n_paths,
            master_seed,
            n_workers: 1,
            record_trajectory: false,
        }
    }

    pub fn with_workers(mut self, n_workers: usize) -> Self {
        self.n_workers = n_workers;
        self
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn validate(&self, dim: usize) -> Result<TimeGrid> {
        if self.n_paths == 0 {
            return Err(invalid("n_paths must be at least 1"));
        }
        if self.n_workers == 0 {
            return Err(invalid("n_workers must be at least 1"));
        }
        if self.x0.len() != dim {
            return Err(invalid(format!(
                "x0 has dimension {} but the model has dimension {dim}",
                self.x0.len()
            )));
        }
        if self.x0.iter().any(|v| !v.is_finite()) {
            return Err(invalid("x0 must be finite"));
        }
        make_time_grid(self.horizon, self.step)
    }
}

/// Evaluates `f(0..n)` on `workers` threads, returning results in index
/// order. The first failing index (not the first to fail in wall-clock
/// time) determines the error.
pub fn par_collect<T, F>(n: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let results: Vec<Result<T>> = if workers <= 1 {
        (0..n).map(&f).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..n).into_par_iter().map(&f).collect())
    };
    results.into_iter().collect()
}

/// Ordered sum, independent of how the terms were produced.
pub fn ordered_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean and standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = ordered_mean(values);
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
