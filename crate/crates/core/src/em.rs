//! Euler–Maruyama simulation of `dX = b(X_{t_δ}) dt + σ dW`.
//!
//! With additive noise the scheme can be written
//! `X_{t_k} = x₀ + Σ_{j<k} b(X_{t_j})Δt_j + σW_{t_k}`, and that is the form
//! evaluated here: paths consume the Brownian path at the grid points rather
//! than its increments. A coarse path that samples the fine Brownian path at
//! every `m`-th point therefore sees exactly the same `W` values, and with
//! zero drift the fine and coarse terminals agree bit for bit.

use crate::drift::DriftSpec;
use crate::error::{invalid, Error, Result};
use crate::grid::TimeGrid;
use crate::sigma::SigmaSpec;
use crate::sim::{par_collect, SimConfig};
use crate::stream::{brownian_path, gaussian_increments, path_stream, PathRng};

/// States with a coordinate beyond this magnitude abort the path.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub terminal: Vec<f64>,
    pub trajectory: Option<Vec<Vec<f64>>>,
    pub increments_consumed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledResult {
    pub path_index: usize,
    pub fine_terminal: Vec<f64>,
    pub coarse_terminal: Vec<f64>,
}

/// Terminal states of one fine path and of several coarse paths driven by
/// the same Brownian motion.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledBatch {
    pub deltas: Vec<f64>,
    pub delta_ref: f64,
    /// `fine[path]`
    pub fine: Vec<Vec<f64>>,
    /// `coarse[level][path]`, aligned with `deltas`.
    pub coarse: Vec<Vec<Vec<f64>>>,
}

/// Runs the scheme on given grid times and Brownian values `W_{t_k}`
/// (flattened, `dim` entries per time).
pub fn em_from_brownian(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    x0: &[f64],
    times: &[f64],
    w: &[f64],
    path_index: usize,
    record: bool,
) -> Result<PathResult> {
    let d = x0.len();
    debug_assert_eq!(w.len(), times.len() * d);
    let mut drift_acc = vec![0.0; d];
    let mut x = x0.to_vec();
    let mut b = vec![0.0; d];
    let mut noise = vec![0.0; d];
    let mut trajectory = record.then(|| {
        let mut t = Vec::with_capacity(times.len());
        t.push(x0.to_vec());
        t
    });
    let n = times.len() - 1;
    for k in 0..n {
        drift.eval(&x, &mut b);
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBlowup {
                path: path_index,
                step: k,
            });
        }
        let dt = times[k + 1] - times[k];
        for (a, bi) in drift_acc.iter_mut().zip(&b) {
            *a += bi * dt;
        }
        sigma.apply(&w[(k + 1) * d..(k + 2) * d], &mut noise);
        for c in 0..d {
            x[c] = x0[c] + drift_acc[c] + noise[c];
        }
        if x.iter().any(|v| !(v.abs() <= BLOWUP_THRESHOLD)) {
            return Err(Error::NumericalBlowup {
                path: path_index,
                step: k + 1,
            });
        }
        if let Some(t) = trajectory.as_mut() {
            t.push(x.clone());
        }
    }
    Ok(PathResult {
        terminal: x,
        trajectory,
        increments_consumed: n,
    })
}

fn check_model(drift: &DriftSpec, sigma: &SigmaSpec) -> Result<()> {
    if drift.dim() != sigma.dim() {
        return Err(invalid(format!(
            "drift dimension {} does not match sigma dimension {}",
            drift.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

/// One path on the grid of `cfg`, with increments drawn from `rng`.
pub fn em_path(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    cfg: &SimConfig,
    rng: &mut PathRng,
) -> Result<PathResult> {
    check_model(drift, sigma)?;
    let grid = cfg.validate(sigma.dim())?;
    path_on_grid(drift, sigma, cfg, &grid, rng, 0)
}

fn path_on_grid(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    cfg: &SimConfig,
    grid: &TimeGrid,
    rng: &mut PathRng,
    path_index: usize,
) -> Result<PathResult> {
    let d = sigma.dim();
    let incs = gaussian_increments(grid, d, rng);
    let w = brownian_path(&incs, d);
    em_from_brownian(
        drift,
        sigma,
        &cfg.x0,
        grid.times(),
        &w,
        path_index,
        cfg.record_trajectory,
    )
}

/// Terminal states of `cfg.n_paths` independent paths; path `i` uses
/// stream `(cfg.master_seed, i)`.
pub fn em_terminal_batch(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    cfg: &SimConfig,
) -> Result<Vec<Vec<f64>>> {
    check_model(drift, sigma)?;
    let grid = cfg.validate(sigma.dim())?;
    let mut quiet = cfg.clone();
    quiet.record_trajectory = false;
    par_collect(cfg.n_paths, cfg.n_workers, |i| {
        let mut rng = path_stream(cfg.master_seed, i as u64);
        path_on_grid(drift, sigma, &quiet, &grid, &mut rng, i).map(|p| p.terminal)
    })
}

/// Integer ratio `δ/δ_ref`, which must be at least 4.
pub fn coarsening_ratio(delta: f64, delta_ref: f64) -> Result<usize> {
    if !(delta > 0.0 && delta_ref > 0.0) {
        return Err(invalid("step sizes must be positive"));
    }
    let r = delta / delta_ref;
    let m = r.round();
    if (r - m).abs() > 1e-9 * r {
        return Err(invalid(format!(
            "delta {delta} is not an integer multiple of delta_ref {delta_ref}"
        )));
    }
    if m < 4.0 {
        return Err(invalid(format!(
            "delta/delta_ref = {m} but must be at least 4"
        )));
    }
    Ok(m as usize)
}

/// Fine-grid indices `0, m, 2m, …` closed off by the final index.
pub fn coarse_indices(n_fine: usize, m: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n_fine).step_by(m).collect();
    idx.push(n_fine);
    idx
}

/// Coarse increments as block sums of fine increments.
pub fn block_sums(fine_increments: &[f64], dim: usize, indices: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity((indices.len() - 1) * dim);
    for win in indices.windows(2) {
        for c in 0..dim {
            let mut acc = 0.0;
            for k in win[0]..win[1] {
                acc += fine_increments[k * dim + c];
            }
            out.push(acc);
        }
    }
    out
}

fn subsample(values: &[f64], dim: usize, indices: &[usize]) -> Vec<f64> {
    indices
        .iter()
        .flat_map(|&k| values[k * dim..(k + 1) * dim].iter().copied())
        .collect()
}

/// Fine (`δ_ref`) and coarse (`cfg.step`) paths on shared Brownian motion.
pub fn em_coupled(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    cfg: &SimConfig,
    delta_ref: f64,
) -> Result<Vec<CoupledResult>> {
    let mut base = cfg.clone();
    base.step = delta_ref;
    let batch = em_coupled_grid(drift, sigma, &base, &[cfg.step])?;
    let coarse = batch.coarse.into_iter().next().expect("one level");
    Ok(batch
        .fine
        .into_iter()
        .zip(coarse)
        .enumerate()
        .map(|(path_index, (fine_terminal, coarse_terminal))| CoupledResult {
            path_index,
            fine_terminal,
            coarse_terminal,
        })
        .collect())
}

/// One fine path at `cfg.step` (the reference step) and one coarse path per
/// entry of `deltas`, all on the same Brownian path.
pub fn em_coupled_grid(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    cfg: &SimConfig,
    deltas: &[f64],
) -> Result<CoupledBatch> {
    check_model(drift, sigma)?;
    let fine_grid = cfg.validate(sigma.dim())?;
    let delta_ref = cfg.step;
    let n_fine = fine_grid.n_intervals();
    let mut level_indices = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        if delta > cfg.horizon {
            return Err(invalid(format!("delta {delta} exceeds horizon {}", cfg.horizon)));
        }
        let m = coarsening_ratio(delta, delta_ref)?;
        level_indices.push(coarse_indices(n_fine, m));
    }
    let d = sigma.dim();
    let level_times: Vec<Vec<f64>> = level_indices
        .iter()
        .map(|idx| subsample(fine_grid.times(), 1, idx))
        .collect();

    let per_path = par_collect(cfg.n_paths, cfg.n_workers, |i| {
        let mut rng = path_stream(cfg.master_seed, i as u64);
        let incs = gaussian_increments(&fine_grid, d, &mut rng);
        let w = brownian_path(&incs, d);
        let fine = em_from_brownian(drift, sigma, &cfg.x0, fine_grid.times(), &w, i, false)?;
        let mut coarse = Vec::with_capacity(deltas.len());
        for (idx, times) in level_indices.iter().zip(&level_times) {
            let wc = subsample(&w, d, idx);
            coarse.push(em_from_brownian(drift, sigma, &cfg.x0, times, &wc, i, false)?.terminal);
        }
        Ok((fine.terminal, coarse))
    })?;

    let mut fine = Vec::with_capacity(cfg.n_paths);
    let mut coarse = vec![Vec::with_capacity(cfg.n_paths); deltas.len()];
    for (f, cs) in per_path {
        fine.push(f);
        for (level, c) in coarse.iter_mut().zip(cs) {
            level.push(c);
        }
    }
    Ok(CoupledBatch {
        deltas: deltas.to_vec(),
        delta_ref,
        fine,
        coarse,
    })
}
