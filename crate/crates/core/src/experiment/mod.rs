//! Weak-error experiments.
//!
//! For each step `δ` on a descending grid the harness estimates
//! `|E f(X_T^{(δ_ref)}) − E f(X_T^{(δ)})|` from coupled fine/coarse paths,
//! attaches percentile-bootstrap intervals, and fits the decay rate on a
//! log-log scale.

mod test_function;

use rand::Rng;
use serde::Serialize;

pub use test_function::{test_function_get, Observable, TestFunction};

use crate::drift::DriftSpec;
use crate::em::{coarsening_ratio, em_coupled_grid, em_terminal_batch, CoupledBatch};
use crate::error::{invalid, Result};
use crate::girsanov::{
    check_lambda_horizon, check_weak_rate_condition, weighted_expectation, WeightVariant,
    NOVIKOV_LAMBDA,
};
use crate::sigma::SigmaSpec;
use crate::sim::{mean_and_se, par_collect, SimConfig};
use crate::stats::{quantile_sorted, variance, weighted_line};
use crate::stream::{derive_seed, path_stream};

pub const DEFAULT_BOOTSTRAP: usize = 1000;
pub const DEFAULT_PATHS: usize = 200_000;
/// Slack below the theoretical exponent tolerated by [`rate_vs_theory`].
pub const RATE_SLACK: f64 = 0.1;

const BOOTSTRAP_SALT: u64 = 0xB007;
const DIRECT_SALT: u64 = 0xD1EC7;

#[derive(Debug, Clone, PartialEq)]
pub struct RateSettings {
    pub horizon: f64,
    pub x0: Vec<f64>,
    /// Strictly descending.
    pub delta_grid: Vec<f64>,
    pub delta_ref: f64,
    pub n_paths: usize,
    pub master_seed: u64,
    pub n_workers: usize,
    pub n_bootstrap: usize,
}

impl RateSettings {
    /// `δ ∈ {T·2⁻²,…,T·2⁻⁷}`, `δ_ref = T·2⁻¹⁰`, 2·10⁵ paths.
    pub fn with_defaults(horizon: f64, x0: Vec<f64>, master_seed: u64) -> Self {
        RateSettings {
            horizon,
            x0,
            delta_grid: dyadic_grid(horizon, 2, 7),
            delta_ref: horizon * (-10f64).exp2(),
            n_paths: DEFAULT_PATHS,
            master_seed,
            n_workers: 1,
            n_bootstrap: DEFAULT_BOOTSTRAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta_grid.is_empty() {
            return Err(invalid("empty delta grid"));
        }
        if self.delta_grid.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(invalid("delta grid must be strictly descending"));
        }
        if self.delta_grid[0] > self.horizon {
            return Err(invalid("largest delta exceeds the horizon"));
        }
        for &d in &self.delta_grid {
            coarsening_ratio(d, self.delta_ref)?;
        }
        if self.n_bootstrap < 10 {
            return Err(invalid("need at least 10 bootstrap resamples"));
        }
        Ok(())
    }

    fn sim_config(&self) -> SimConfig {
        SimConfig::new(
            self.horizon,
            self.delta_ref,
            self.x0.clone(),
            self.n_paths,
            self.master_seed,
        )
        .with_workers(self.n_workers)
    }
}

/// `{T·2^{−k} : k = k_min..=k_max}`, largest first.
pub fn dyadic_grid(horizon: f64, k_min: u32, k_max: u32) -> Vec<f64> {
    (k_min..=k_max).map(|k| horizon * (-(k as f64)).exp2()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub drift: String,
    pub f: String,
    pub horizon: f64,
    pub delta_grid: Vec<f64>,
    pub delta_ref: f64,
    pub n_paths: usize,
    /// `|Ê f(X^{δ_ref}) − Ê f(X^{δ})|`
    pub errors: Vec<f64>,
    pub signed_errors: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    /// Whether the point's bootstrap interval excludes zero (and so enters the fit).
    pub in_fit: Vec<bool>,
    pub fitted_rate: Option<f64>,
    pub fitted_rate_ci: Option<(f64, f64)>,
    pub theoretical_alpha: Option<f64>,
    pub condition_pass: bool,
    pub max_horizon: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum VerdictKind {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// `ci_low − (α − slack)`
    pub margin: Option<f64>,
    pub reason: String,
}

/// PASS when the lower end of the fitted-rate interval reaches `α − 0.1`.
/// Faster observed decay also passes.
pub fn rate_vs_theory(report: &RateReport) -> Verdict {
    let (Some(alpha), Some((lo, _))) = (report.theoretical_alpha, report.fitted_rate_ci) else {
        let reason = if report.degenerate {
            "degenerate fit"
        } else {
            "no theoretical rate"
        };
        return Verdict {
            kind: VerdictKind::NotApplicable,
            margin: None,
            reason: reason.into(),
        };
    };
    let margin = lo - (alpha - RATE_SLACK);
    let kind = if margin >= 0.0 {
        VerdictKind::Pass
    } else {
        VerdictKind::Fail
    };
    Verdict {
        kind,
        margin: Some(margin),
        reason: format!("rate CI lower bound {lo:.4} vs alpha {alpha} - {RATE_SLACK}"),
    }
}

/// Weighted least-squares slope of `log error` against `log δ`.
pub fn fit_log_log(deltas: &[f64], errors: &[f64], weights: &[f64]) -> Option<f64> {
    let x: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    weighted_line(&x, &y, weights).map(|(slope, _)| slope)
}

/// Simulates the coupled batch for `settings`.
pub fn simulate_coupled(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    settings: &RateSettings,
) -> Result<CoupledBatch> {
    settings.validate()?;
    em_coupled_grid(drift, sigma, &settings.sim_config(), &settings.delta_grid)
}

pub fn weak_error_curve(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    f: &TestFunction,
    settings: &RateSettings,
) -> Result<RateReport> {
    let batch = simulate_coupled(drift, sigma, settings)?;
    rate_report(drift, sigma, f, settings, &batch)
}

/// Several observables evaluated on one simulated batch.
pub fn weak_error_curves(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    fs: &[TestFunction],
    settings: &RateSettings,
) -> Result<Vec<RateReport>> {
    let batch = simulate_coupled(drift, sigma, settings)?;
    fs.iter()
        .map(|f| rate_report(drift, sigma, f, settings, &batch))
        .collect()
}

/// Builds the report for one observable from an existing batch.
pub fn rate_report(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    f: &TestFunction,
    settings: &RateSettings,
    batch: &CoupledBatch,
) -> Result<RateReport> {
    let n = batch.fine.len();
    let levels = batch.deltas.len();
    // path-major differences f(coarse) − f(fine)
    let mut diffs = vec![0.0; n * levels];
    for (i, fine) in batch.fine.iter().enumerate() {
        let ff = f.eval(fine);
        for l in 0..levels {
            diffs[i * levels + l] = f.eval(&batch.coarse[l][i]) - ff;
        }
    }
    let mut signed = vec![0.0; levels];
    for row in diffs.chunks(levels) {
        for (s, v) in signed.iter_mut().zip(row) {
            *s += v;
        }
    }
    for s in signed.iter_mut() {
        *s /= n as f64;
    }
    let errors: Vec<f64> = signed.iter().map(|s| s.abs()).collect();

    let replicates = if diffs.iter().all(|d| *d == 0.0) {
        vec![vec![0.0; levels]; settings.n_bootstrap]
    } else {
        bootstrap_means(&diffs, levels, settings)?
    };

    let mut ci_low = Vec::with_capacity(levels);
    let mut ci_high = Vec::with_capacity(levels);
    let mut in_fit = Vec::with_capacity(levels);
    let mut log_var = Vec::with_capacity(levels);
    for l in 0..levels {
        let mut col: Vec<f64> = replicates.iter().map(|r| r[l]).collect();
        col.sort_by(f64::total_cmp);
        let lo = quantile_sorted(&col, 0.025);
        let hi = quantile_sorted(&col, 0.975);
        let excludes_zero = lo > 0.0 || hi < 0.0;
        let (a, b) = (lo.abs().min(hi.abs()), lo.abs().max(hi.abs()));
        ci_low.push(if excludes_zero { a } else { 0.0 });
        ci_high.push(b);
        in_fit.push(excludes_zero);
        let logs: Vec<f64> = col
            .iter()
            .filter(|v| **v != 0.0)
            .map(|v| v.abs().ln())
            .collect();
        log_var.push(if logs.len() > 1 { variance(&logs).max(1e-12) } else { f64::NAN });
    }

    let used: Vec<usize> = (0..levels).filter(|&l| in_fit[l]).collect();
    let degenerate = used.len() < 3;
    let (fitted_rate, fitted_rate_ci) = if degenerate {
        (None, None)
    } else {
        let ds: Vec<f64> = used.iter().map(|&l| batch.deltas[l]).collect();
        let es: Vec<f64> = used.iter().map(|&l| errors[l]).collect();
        let ws: Vec<f64> = used.iter().map(|&l| 1.0 / log_var[l]).collect();
        let rate = fit_log_log(&ds, &es, &ws);
        let mut slopes: Vec<f64> = replicates
            .iter()
            .filter_map(|r| {
                let e: Vec<f64> = used.iter().map(|&l| r[l].abs()).collect();
                if e.iter().any(|v| *v == 0.0) {
                    return None;
                }
                fit_log_log(&ds, &e, &ws)
            })
            .collect();
        slopes.sort_by(f64::total_cmp);
        let ci = (!slopes.is_empty())
            .then(|| (quantile_sorted(&slopes, 0.025), quantile_sorted(&slopes, 0.975)));
        (rate, ci)
    };

    let p0 = drift.theoretical_p0.unwrap_or(2.0);
    let cond = check_weak_rate_condition(settings.horizon, drift.effective_l2(), sigma, p0)?;
    Ok(RateReport {
        drift: drift.name().to_string(),
        f: f.name().to_string(),
        horizon: settings.horizon,
        delta_grid: batch.deltas.clone(),
        delta_ref: batch.delta_ref,
        n_paths: n,
        errors,
        signed_errors: signed,
        ci_low,
        ci_high,
        in_fit,
        fitted_rate,
        fitted_rate_ci,
        theoretical_alpha: drift.theoretical_alpha,
        condition_pass: cond.pass,
        max_horizon: cond.max_horizon,
        degenerate: degenerate || fitted_rate.is_none(),
    })
}

/// Resampled means of each column; replicate `b` draws from stream `b`.
fn bootstrap_means(diffs: &[f64], levels: usize, settings: &RateSettings) -> Result<Vec<Vec<f64>>> {
    let n = diffs.len() / levels;
    let seed = derive_seed(settings.master_seed, BOOTSTRAP_SALT);
    par_collect(settings.n_bootstrap, settings.n_workers, |b| {
        let mut rng = path_stream(seed, b as u64);
        let mut acc = vec![0.0; levels];
        for _ in 0..n {
            let i = rng.random_range(0..n);
            for (a, v) in acc.iter_mut().zip(&diffs[i * levels..(i + 1) * levels]) {
                *a += v;
            }
        }
        Ok(acc.into_iter().map(|a| a / n as f64).collect())
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckSettings {
    pub horizon: f64,
    pub delta: f64,
    pub x0: Vec<f64>,
    pub n_paths: usize,
    pub master_seed: u64,
    pub n_workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckRecord {
    pub drift: String,
    pub f: String,
    pub horizon: f64,
    pub delta: f64,
    pub n_paths: usize,
    pub weighted: f64,
    pub weighted_se: f64,
    pub direct: f64,
    pub direct_se: f64,
    pub z_score: f64,
    /// Set when the Novikov horizon check fails and nothing was run.
    pub skipped: Option<String>,
}

impl CrossCheckRecord {
    pub fn agrees(&self, z_max: f64) -> bool {
        self.skipped.is_none() && self.z_score.abs() <= z_max
    }
}

/// Compares the `R₂`-weighted estimate of `E f(X_T^{(δ)})` with a direct
/// Euler–Maruyama estimate on independent paths.
pub fn girsanov_cross_check(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    f: &TestFunction,
    settings: &CrossCheckSettings,
) -> Result<CrossCheckRecord> {
    let mut record = CrossCheckRecord {
        drift: drift.name().to_string(),
        f: f.name().to_string(),
        horizon: settings.horizon,
        delta: settings.delta,
        n_paths: settings.n_paths,
        weighted: f64::NAN,
        weighted_se: f64::NAN,
        direct: f64::NAN,
        direct_se: f64::NAN,
        z_score: f64::NAN,
        skipped: None,
    };
    let check = check_lambda_horizon(settings.horizon, NOVIKOV_LAMBDA, drift.effective_l2(), sigma);
    if !check.pass {
        record.skipped = Some(format!(
            "Novikov horizon check failed: lhs = {:.6} >= 1",
            check.lhs
        ));
        return Ok(record);
    }
    let cfg = SimConfig::new(
        settings.horizon,
        settings.delta,
        settings.x0.clone(),
        settings.n_paths,
        settings.master_seed,
    )
    .with_workers(settings.n_workers);
    let w = weighted_expectation(
        drift,
        sigma,
        &cfg,
        |x| f.eval(x),
        WeightVariant::Frozen {
            delta: settings.delta,
        },
    )?;
    let mut direct_cfg = cfg.clone();
    direct_cfg.master_seed = derive_seed(settings.master_seed, DIRECT_SALT);
    let terminals = em_terminal_batch(drift, sigma, &direct_cfg)?;
    let values: Vec<f64> = terminals.iter().map(|x| f.eval(x)).collect();
    let (direct, direct_se) = mean_and_se(&values);
    let joint = (w.std_err * w.std_err + direct_se * direct_se).sqrt();
    let diff = w.estimate - direct;
    record.weighted = w.estimate;
    record.weighted_se = w.std_err;
    record.direct = direct;
    record.direct_se = direct_se;
    record.z_score = if joint > 0.0 {
        diff / joint
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(record)
}
