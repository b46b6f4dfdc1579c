//! Change of measure against the driftless reference process `Y = x + σW`.
//!
//! Under `Q₁ = R₁ P` the reference process has the law of the SDE, and
//! under `Q₂ = R₂ P` the law of its Euler–Maruyama approximation, where
//!
//! ```text
//! R₁ = exp{ ∫⟨σ⁻¹b(Y_s), dW_s⟩ − ½∫|σ⁻¹b(Y_s)|² ds }
//! R₂ = exp{ ∫⟨σ⁻¹b(Y_{s_δ}), dW_s⟩ − ½∫|σ⁻¹b(Y_{s_δ})|² ds }
//! ```
//!
//! `R₂` is computed exactly on any grid that refines its δ-grid because
//! its integrand is piecewise constant. `R₁` uses the left-point rule on the
//! simulation grid, which makes it coincide with `R₂` at δ equal to the grid
//! step.

use serde::Serialize;

use crate::drift::DriftSpec;
use crate::error::{invalid, Error, Result};
use crate::grid::TimeGrid;
use crate::sigma::SigmaSpec;
use crate::sim::{mean_and_se, par_collect, SimConfig};
use crate::stream::{brownian_path, gaussian_increments, path_stream};

/// Exponent used for the Novikov check: `½(1 + ε)` with `ε = 0.05`.
pub const NOVIKOV_LAMBDA: f64 = 0.5 * (1.0 + 0.05);

/// Share of the total carried by the top 1% of samples above which an
/// exponential-moment estimate is flagged as heavy-tailed.
pub const HEAVY_TAIL_SHARE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WeightVariant {
    /// `R₁`: drift evaluated at every grid point.
    Continuous,
    /// `R₂`: drift frozen at `s_δ = [s/δ]δ`.
    Frozen { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSample {
    pub log_weight: f64,
    pub ito_term: f64,
    pub quad_term: f64,
    pub variant: WeightVariant,
}

impl WeightSample {
    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaCheck {
    pub pass: bool,
    pub lhs: f64,
    pub margin: f64,
}

/// `2T²λL₂²‖σ⁻¹‖²‖σ‖² < 1`, which makes `E exp{λ∫|σ⁻¹b(Y_s)|²ds}` finite.
pub fn check_lambda_horizon(horizon: f64, lambda: f64, l2: f64, sigma: &SigmaSpec) -> LambdaCheck {
    if lambda == 0.0 || horizon == 0.0 {
        return LambdaCheck {
            pass: true,
            lhs: 0.0,
            margin: 1.0,
        };
    }
    let inv = sigma.inv_op_norm();
    let op = sigma.op_norm();
    let lhs = 2.0 * horizon * horizon * lambda * l2 * l2 * inv * inv * op * op;
    LambdaCheck {
        pass: lhs < 1.0,
        lhs,
        margin: 1.0 - lhs,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateCondition {
    pub pass: bool,
    pub lhs: f64,
    pub max_horizon: f64,
}

/// `T L₂ ‖σ⁻¹‖‖σ‖ √(2(p₀+1)(p₀+3)) / (p₀−1) < 1`.
///
/// `max_horizon` is the supremum of admissible `T`, infinite when `L₂ = 0`.
pub fn check_weak_rate_condition(
    horizon: f64,
    l2: f64,
    sigma: &SigmaSpec,
    p0: f64,
) -> Result<RateCondition> {
    if !(p0 >= 2.0) {
        return Err(invalid(format!("p0 must be at least 2, got {p0}")));
    }
    let factor = (2.0 * (p0 + 1.0) * (p0 + 3.0)).sqrt() / (p0 - 1.0);
    let k = l2 * sigma.inv_op_norm() * sigma.op_norm() * factor;
    let max_horizon = if k == 0.0 { f64::INFINITY } else { 1.0 / k };
    Ok(RateCondition {
        pass: horizon < max_horizon,
        lhs: horizon * k,
        max_horizon,
    })
}

fn frozen_ratio(delta: f64, step: f64) -> Result<usize> {
    let r = delta / step;
    let m = r.round();
    if !(m >= 1.0) || (r - m).abs() > 1e-9 * r {
        return Err(invalid(format!(
            "frozen step {delta} is not a multiple of the grid step {step}"
        )));
    }
    Ok(m as usize)
}

struct WeightPath {
    sample: WeightSample,
    y_terminal: Vec<f64>,
}

fn weight_path(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    x0: &[f64],
    grid: &TimeGrid,
    increments: &[f64],
    variant: WeightVariant,
    path_index: usize,
) -> Result<WeightPath> {
    let d = x0.len();
    let n = grid.n_intervals();
    if increments.len() != n * d {
        return Err(invalid("increments do not match the grid"));
    }
    let m = match variant {
        WeightVariant::Continuous => 1,
        WeightVariant::Frozen { delta } => frozen_ratio(delta, grid.step())?,
    };
    let w = brownian_path(increments, d);
    let mut y = vec![0.0; d];
    let mut b = vec![0.0; d];
    let mut u = vec![0.0; d];
    let mut ito = 0.0;
    let mut quad = 0.0;
    let mut u_sq = 0.0;
    for k in 0..n {
        if k % m == 0 {
            sigma.apply(&w[k * d..(k + 1) * d], &mut y);
            for (yc, xc) in y.iter_mut().zip(x0) {
                *yc += xc;
            }
            drift.eval(&y, &mut b);
            sigma.apply_inv(&b, &mut u);
            u_sq = u.iter().map(|v| v * v).sum();
        }
        let dw = &increments[k * d..(k + 1) * d];
        ito += u.iter().zip(dw).map(|(a, c)| a * c).sum::<f64>();
        quad += u_sq * grid.interval(k);
    }
    let quad_term = 0.5 * quad;
    let log_weight = ito - quad_term;
    if !log_weight.is_finite() || !log_weight.exp().is_finite() {
        return Err(Error::NumericalBlowup {
            path: path_index,
            step: n,
        });
    }
    let mut y_terminal = vec![0.0; d];
    sigma.apply(&w[n * d..(n + 1) * d], &mut y_terminal);
    for (yc, xc) in y_terminal.iter_mut().zip(x0) {
        *yc += xc;
    }
    Ok(WeightPath {
        sample: WeightSample {
            log_weight,
            ito_term: ito,
            quad_term,
            variant,
        },
        y_terminal,
    })
}

/// Girsanov weight of one reference path `Y_{t_k} = x₀ + σW_{t_k}`.
pub fn weights_along_path(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    x0: &[f64],
    grid: &TimeGrid,
    increments: &[f64],
    variant: WeightVariant,
) -> Result<WeightSample> {
    weight_path(drift, sigma, x0, grid, increments, variant, 0).map(|p| p.sample)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedEstimate {
    pub estimate: f64,
    pub std_err: f64,
    /// Sample mean of the weight itself, whose expectation is 1.
    pub mean_weight: f64,
    pub weight_std_err: f64,
    pub n_paths: usize,
}

/// Estimates `E f(X_T)` (variant `R₁`) or `E f(X_T^{(δ)})` (variant `R₂`)
/// as the mean of `R·f(x₀ + σW_T)`. The weights are computed on the grid of
/// `cfg.step`.
pub fn weighted_expectation<F>(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    cfg: &SimConfig,
    f: F,
    variant: WeightVariant,
) -> Result<WeightedEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let check = check_lambda_horizon(cfg.horizon, NOVIKOV_LAMBDA, drift.effective_l2(), sigma);
    if !check.pass {
        return Err(Error::Precondition(format!(
            "Novikov horizon check failed (lhs = {:.6} ≥ 1)",
            check.lhs
        )));
    }
    let grid = cfg.validate(sigma.dim())?;
    let d = sigma.dim();
    let pairs = par_collect(cfg.n_paths, cfg.n_workers, |i| {
        let mut rng = path_stream(cfg.master_seed, i as u64);
        let incs = gaussian_increments(&grid, d, &mut rng);
        let p = weight_path(drift, sigma, &cfg.x0, &grid, &incs, variant, i)?;
        let r = p.sample.weight();
        Ok((r * f(&p.y_terminal), r))
    })?;
    let (values, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let (estimate, std_err) = mean_and_se(&values);
    let (mean_weight, weight_std_err) = mean_and_se(&weights);
    Ok(WeightedEstimate {
        estimate,
        std_err,
        mean_weight,
        weight_std_err,
        n_paths: cfg.n_paths,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpMomentReport {
    pub lambda: f64,
    pub horizon: f64,
    pub estimate: f64,
    pub std_err: f64,
    /// Share of the finite-sample total carried by the largest 1% of samples.
    pub tail_diagnostic: f64,
    pub heavy_tail: bool,
    pub sample_max: f64,
    pub non_finite: usize,
    pub n_paths: usize,
}

/// Monte Carlo estimate of `E exp{λ∫₀ᵀ|σ⁻¹b(Y_s)|²ds}` (or with `Y_{s_δ}`
/// for the frozen variant), with a Riemann sum on the grid of `cfg.step`.
/// Runs regardless of whether the horizon condition holds.
pub fn exp_moment_estimate(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    lambda: f64,
    cfg: &SimConfig,
    variant: WeightVariant,
) -> Result<ExpMomentReport> {
    let samples = exp_moment_samples(drift, sigma, lambda, cfg, variant)?;
    let finite: Vec<f64> = samples.iter().copied().filter(|v| v.is_finite()).collect();
    let non_finite = samples.len() - finite.len();
    let (estimate, std_err) = if finite.is_empty() {
        (f64::INFINITY, f64::NAN)
    } else {
        mean_and_se(&finite)
    };
    let tail_diagnostic = top_share(&finite, 0.01);
    Ok(ExpMomentReport {
        lambda,
        horizon: cfg.horizon,
        estimate: if non_finite > 0 { f64::INFINITY } else { estimate },
        std_err,
        tail_diagnostic,
        heavy_tail: tail_diagnostic > HEAVY_TAIL_SHARE,
        sample_max: finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        non_finite,
        n_paths: cfg.n_paths,
    })
}

/// Per-path values of `exp{λ∫|σ⁻¹b|²ds}`.
pub fn exp_moment_samples(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    lambda: f64,
    cfg: &SimConfig,
    variant: WeightVariant,
) -> Result<Vec<f64>> {
    if lambda < 0.0 {
        return Err(invalid("lambda must be nonnegative"));
    }
    let grid = cfg.validate(sigma.dim())?;
    if lambda == 0.0 {
        return Ok(vec![1.0; cfg.n_paths]);
    }
    let d = sigma.dim();
    par_collect(cfg.n_paths, cfg.n_workers, |i| {
        let mut rng = path_stream(cfg.master_seed, i as u64);
        let incs = gaussian_increments(&grid, d, &mut rng);
        // quad_term is ½∫|σ⁻¹b|²; a failed weight only means the Itô part overflowed
        let integral = match weight_path(drift, sigma, &cfg.x0, &grid, &incs, variant, i) {
            Ok(p) => 2.0 * p.sample.quad_term,
            Err(Error::NumericalBlowup { .. }) => {
                quad_integral(drift, sigma, &cfg.x0, &grid, &incs, variant)?
            }
            Err(e) => return Err(e),
        };
        Ok((lambda * integral).exp())
    })
}

fn quad_integral(
    drift: &DriftSpec,
    sigma: &SigmaSpec,
    x0: &[f64],
    grid: &TimeGrid,
    increments: &[f64],
    variant: WeightVariant,
) -> Result<f64> {
    let d = x0.len();
    let m = match variant {
        WeightVariant::Continuous => 1,
        WeightVariant::Frozen { delta } => frozen_ratio(delta, grid.step())?,
    };
    let w = brownian_path(increments, d);
    let (mut y, mut b, mut u) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut total = 0.0;
    let mut u_sq = 0.0;
    for k in 0..grid.n_intervals() {
        if k % m == 0 {
            sigma.apply(&w[k * d..(k + 1) * d], &mut y);
            for (yc, xc) in y.iter_mut().zip(x0) {
                *yc += xc;
            }
            drift.eval(&y, &mut b);
            sigma.apply_inv(&b, &mut u);
            u_sq = u.iter().map(|v| v * v).sum();
        }
        total += u_sq * grid.interval(k);
    }
    Ok(total)
}

fn top_share(values: &[f64], fraction: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let total: f64 = values.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let k = ((values.len() as f64 * fraction).ceil() as usize).max(1);
    (sorted[..k].iter().sum::<f64>() / total).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::{catalog_get, Params};
    use crate::grid::make_time_grid;
    use crate::stream::path_stream;

    #[test]
    fn lambda_check_examples() {
        let id = SigmaSpec::identity(1).unwrap();
        let c = check_lambda_horizon(3.0, 7.0, 0.0, &id);
        assert!(c.pass);
        assert_eq!(c.margin, 1.0);
        let c = check_lambda_horizon(0.5, 1.0, 1.0, &id);
        assert_eq!(c.lhs, 0.5);
        assert!(c.pass);
        let c = check_lambda_horizon(1.0, 1.0, 1.0, &id);
        assert_eq!(c.lhs, 2.0);
        assert!(!c.pass);
        let c = check_lambda_horizon(0.0, 1.0, 1.0, &id);
        assert!(c.pass && c.margin == 1.0);
    }

    #[test]
    fn rate_condition_examples() {
        let id = SigmaSpec::identity(1).unwrap();
        let c = check_weak_rate_condition(0.15, 1.0, &id, 2.0).unwrap();
        assert!((c.max_horizon - 1.0 / 30f64.sqrt()).abs() < 1e-12);
        assert!(c.pass);
        assert!(!check_weak_rate_condition(0.5, 1.0, &id, 2.0).unwrap().pass);
        let c = check_weak_rate_condition(1e6, 0.0, &id, 2.0).unwrap();
        assert!(c.pass && c.max_horizon.is_infinite());
        assert!(check_weak_rate_condition(0.1, 1.0, &id, 1.5).is_err());
    }

    #[test]
    fn zero_drift_weight_is_one() {
        let drift = catalog_get("zero", &Params::new()).unwrap();
        let sigma = SigmaSpec::identity(1).unwrap();
        let grid = make_time_grid(1.0, 1.0 / 64.0).unwrap();
        let incs = gaussian_increments(&grid, 1, &mut path_stream(3, 0));
        for v in [WeightVariant::Continuous, WeightVariant::Frozen { delta: 0.25 }] {
            let s = weights_along_path(&drift, &sigma, &[0.0], &grid, &incs, v).unwrap();
            assert_eq!(s.log_weight, 0.0);
            assert_eq!(s.weight(), 1.0);
        }
    }

    #[test]
    fn constant_drift_closed_form() {
        let p: Params = [("a".to_string(), 0.7), ("lambda".to_string(), 0.0)]
            .into_iter()
            .collect();
        let drift = catalog_get("linear", &p).unwrap();
        let sigma = SigmaSpec::identity(1).unwrap();
        let grid = make_time_grid(1.0, 1.0 / 32.0).unwrap();
        let incs = gaussian_increments(&grid, 1, &mut path_stream(5, 2));
        let w_t: f64 = incs.iter().sum();
        let s = weights_along_path(&drift, &sigma, &[0.0], &grid, &incs, WeightVariant::Continuous)
            .unwrap();
        assert!((s.ito_term - 0.7 * w_t).abs() < 1e-12);
        assert!((s.quad_term - 0.5 * 0.49).abs() < 1e-12);
        assert!((s.log_weight - (s.ito_term - s.quad_term)).abs() == 0.0);
    }

    #[test]
    fn frozen_at_grid_step_equals_continuous() {
        let drift = catalog_get("svc", &Params::new()).unwrap();
        let sigma = SigmaSpec::identity(1).unwrap();
        let grid = make_time_grid(0.5, 0.5 / 128.0).unwrap();
        let incs = gaussian_increments(&grid, 1, &mut path_stream(1, 1));
        let a = weights_along_path(&drift, &sigma, &[0.4], &grid, &incs, WeightVariant::Continuous)
            .unwrap();
        let b = weights_along_path(
            &drift,
            &sigma,
            &[0.4],
            &grid,
            &incs,
            WeightVariant::Frozen { delta: grid.step() },
        )
        .unwrap();
        assert_eq!(a.log_weight, b.log_weight);
        assert_eq!(a.ito_term, b.ito_term);
    }

    #[test]
    fn precondition_failure() {
        let p: Params = [("lambda".to_string(), 1.0)].into_iter().collect();
        let drift = catalog_get("linear", &p).unwrap();
        let sigma = SigmaSpec::identity(1).unwrap();
        let cfg = SimConfig::new(2.0, 0.1, vec![1.0], 10, 0);
        let err = weighted_expectation(&drift, &sigma, &cfg, |x| x[0], WeightVariant::Continuous);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_drift_moment_is_one() {
        let drift = catalog_get("zero", &Params::new()).unwrap();
        let sigma = SigmaSpec::identity(1).unwrap();
        let cfg = SimConfig::new(1.0, 0.01, vec![0.0], 100, 0);
        let r = exp_moment_estimate(&drift, &sigma, 1.0, &cfg, WeightVariant::Continuous).unwrap();
        assert_eq!(r.estimate, 1.0);
        let r = exp_moment_estimate(&drift, &sigma, 0.0, &cfg, WeightVariant::Continuous).unwrap();
        assert_eq!(r.estimate, 1.0);
    }

    #[test]
    fn tail_share_bounds() {
        assert_eq!(top_share(&[1.0; 100], 0.01), 0.01);
        let mut v = vec![0.0; 99];
        v.push(5.0);
        assert_eq!(top_share(&v, 0.01), 1.0);
    }
}
