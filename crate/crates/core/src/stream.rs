//! Per-path random streams.
//!
//! Path `i` of a run with master seed `s` draws from ChaCha8 keyed by `s`
//! on stream `i`. The mapping does not depend on how paths are scheduled
//! across workers, so every batch result is reproducible from
//! `(master_seed, path_index)` alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::grid::TimeGrid;

pub type PathRng = ChaCha8Rng;

pub fn path_stream(master_seed: u64, path_index: u64) -> PathRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(path_index);
    rng
}

/// Derives an unrelated master seed, used when two estimators must be
/// statistically independent.
pub fn derive_seed(master_seed: u64, salt: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master_seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Brownian increments `W_{t_{k+1}} − W_{t_k}` over the grid, flattened
/// row-major (`dim` entries per interval).
pub fn gaussian_increments(grid: &TimeGrid, dim: usize, rng: &mut PathRng) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.n_intervals() * dim);
    for k in 0..grid.n_intervals() {
        let sd = grid.interval(k).sqrt();
        for _ in 0..dim {
            let z: f64 = rng.sample(StandardNormal);
            out.push(sd * z);
        }
    }
    out
}

/// Cumulative Brownian path `W_{t_k}` (with `W_0 = 0`) from increments.
pub fn brownian_path(increments: &[f64], dim: usize) -> Vec<f64> {
    let n = increments.len() / dim;
    let mut path = vec![0.0; (n + 1) * dim];
    for k in 0..n {
        for c in 0..dim {
            path[(k + 1) * dim + c] = path[k * dim + c] + increments[k * dim + c];
        }
    }
    path
}
