//! Numerical checks of drift regularity in one dimension.
//!
//! * the `L²` shift modulus `M(u) = ∫|b(x+u) − b(x)|² dx`,
//! * the Gaussian-smoothed double integral
//!   `D(z,s,r) = ∫∫|b(y)−b(x)|^{p₀} e^{−|x−z|²/s − |y−x|²/r} / (s^{1/2} r^{1/2}) dx dy`
//!   and the fit of `sup_z D ≤ (φ(s) r^α)^{p₀}`,
//! * the Gagliardo seminorm `[b]_{W^{β,p}}`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::drift::DriftSpec;
use crate::error::{invalid, Error, Result};
use crate::sim::par_collect;
use crate::stats::{line, log_log_line};
use crate::stream::path_stream;

pub const MIN_H2_SAMPLES: usize = 10_000;
pub const Z_GRID_POINTS: usize = 41;
pub const GAGLIARDO_CUTOFF: f64 = 1.0 / 1024.0;

fn scalar_profile(drift: &DriftSpec) -> Result<&(dyn Fn(f64) -> f64 + Send + Sync)> {
    drift
        .profile()
        .map(|p| p.as_ref())
        .ok_or_else(|| invalid(format!("drift `{}` has no scalar profile", drift.name())))
}

fn compact_support(drift: &DriftSpec) -> Result<(f64, f64)> {
    drift
        .support
        .ok_or_else(|| Error::UnsupportedDrift(drift.name().to_string()))
}

/// Default quadrature spacing for shift `u`: `min(|u|/16, 2⁻¹²)`.
pub fn default_spacing(u: f64) -> f64 {
    (u.abs() / 16.0).min(1.0 / 4096.0)
}

/// Midpoint-rule `M(u)` for a profile vanishing outside `support`.
pub fn shift_modulus_of<F: Fn(f64) -> f64 + ?Sized>(
    b: &F,
    support: (f64, f64),
    u: f64,
    spacing: f64,
) -> f64 {
    let (a1, a2) = support;
    if u == 0.0 || a2 <= a1 {
        return 0.0;
    }
    // the integrand vanishes unless x or x + u lies in the support
    let lo = a1.min(a1 - u);
    let hi = a2.max(a2 - u);
    let n = ((hi - lo) / spacing).ceil() as usize;
    let h = (hi - lo) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let x = lo + (i as f64 + 0.5) * h;
        let d = b(x + u) - b(x);
        acc += d * d;
    }
    acc * h
}

/// `M(u)` for a compactly supported catalog drift.
pub fn l2_shift_modulus(drift: &DriftSpec, u: f64, spacing: Option<f64>) -> Result<f64> {
    let support = compact_support(drift)?;
    let b = scalar_profile(drift)?;
    let h = spacing.unwrap_or_else(|| default_spacing(u));
    if u != 0.0 && !(h > 0.0 && h <= u.abs() / 16.0) {
        return Err(invalid(format!("spacing {h} does not resolve shift {u}")));
    }
    Ok(shift_modulus_of(b, support, u, h))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusCurve {
    pub shifts: Vec<f64>,
    pub values: Vec<f64>,
    /// `e` in `M(u) ≈ C u^e`; NaN when degenerate.
    pub fitted_exponent: f64,
    pub fitted_constant: f64,
    /// Shifts whose modulus came out exactly zero; left out of the fit.
    pub excluded: Vec<f64>,
    /// All values zero (constant drift).
    pub degenerate: bool,
}

impl ModulusCurve {
    /// `M(u) ≤ c·|u|` at every probed shift.
    pub fn satisfies_linear_bound(&self, c: f64) -> bool {
        self.shifts
            .iter()
            .zip(&self.values)
            .all(|(u, m)| *m <= c * u.abs())
    }
}

pub fn modulus_curve(drift: &DriftSpec, u_grid: &[f64]) -> Result<ModulusCurve> {
    if u_grid.is_empty() || u_grid.iter().any(|u| !(*u > 0.0)) {
        return Err(invalid("shift grid must be non-empty and positive"));
    }
    let values = u_grid
        .iter()
        .map(|&u| l2_shift_modulus(drift, u, None))
        .collect::<Result<Vec<_>>>()?;
    let (mut us, mut ms, mut excluded) = (Vec::new(), Vec::new(), Vec::new());
    for (&u, &m) in u_grid.iter().zip(&values) {
        if m > 0.0 {
            us.push(u);
            ms.push(m);
        } else {
            excluded.push(u);
        }
    }
    let degenerate = us.is_empty();
    let (fitted_exponent, fitted_constant) = match log_log_line(&us, &ms) {
        Some((slope, icpt)) => (slope, icpt.exp()),
        None => (f64::NAN, f64::NAN),
    };
    Ok(ModulusCurve {
        shifts: u_grid.to_vec(),
        values,
        fitted_exponent,
        fitted_constant,
        excluded,
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
}

/// Monte Carlo estimate of `D(z, s, r)` for a 1-d profile.
///
/// `e^{−(x−z)²/s}` is `√(πs)` times the `N(z, s/2)` density and
/// `e^{−(y−x)²/r}` is `√(πr)` times the `N(x, r/2)` density, so
/// `D = π·E|b(Y) − b(X)|^{p₀}` with `X ~ N(z, s/2)`, `Y = X + N(0, r/2)`.
pub fn h2_integral_of<F: Fn(f64) -> f64 + ?Sized>(
    b: &F,
    p0: f64,
    z: f64,
    s: f64,
    r: f64,
    n_samples: usize,
    seed: u64,
    stream: u64,
) -> Result<McEstimate> {
    if !(s > 0.0) || !(r > 0.0) {
        return Err(invalid(format!("s and r must be positive, got s={s}, r={r}")));
    }
    if n_samples < MIN_H2_SAMPLES {
        return Err(invalid(format!(
            "at least {MIN_H2_SAMPLES} samples required, got {n_samples}"
        )));
    }
    let mut rng = path_stream(seed, stream);
    let sx = (s / 2.0).sqrt();
    let sy = (r / 2.0).sqrt();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let gx: f64 = rng.sample(StandardNormal);
        let gy: f64 = rng.sample(StandardNormal);
        let x = z + sx * gx;
        let y = x + sy * gy;
        let v = (b(y) - b(x)).abs().powf(p0);
        sum += v;
        sum_sq += v * v;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let pi = std::f64::consts::PI;
    Ok(McEstimate {
        mean: pi * mean,
        std_err: pi * (var / n).sqrt(),
    })
}

pub fn h2_integral_estimate(
    drift: &DriftSpec,
    p0: f64,
    z: f64,
    s: f64,
    r: f64,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    h2_integral_of(scalar_profile(drift)?, p0, z, s, r, n_samples, seed, 0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct H2Grids {
    pub s_grid: Vec<f64>,
    /// Values in `(0, 1]`.
    pub r_grid: Vec<f64>,
    /// Probe centers; when `None`, `Z_GRID_POINTS` equispaced centers over
    /// the drift's probe window widened by `3√s` on each side.
    pub z_grid: Option<Vec<f64>>,
    pub n_samples: usize,
    pub seed: u64,
    pub n_workers: usize,
}

impl Default for H2Grids {
    fn default() -> Self {
        H2Grids {
            s_grid: vec![0.5, 2.0],
            r_grid: (4..=12).step_by(2).map(|k| (-(k as f64)).exp2()).collect(),
            z_grid: None,
            n_samples: 100_000,
            seed: 0x4832,
            n_workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H2Fit {
    pub p0: f64,
    pub s_grid: Vec<f64>,
    pub r_grid: Vec<f64>,
    /// Probe centers used for each `s`.
    pub z_grids: Vec<Vec<f64>>,
    /// `integral_table[s][r][z]`
    pub integral_table: Vec<Vec<Vec<f64>>>,
    /// `sup_z D(z, s, r)`, indexed `[s][r]`.
    pub sup_table: Vec<Vec<f64>>,
    /// Slope of `log sup_z D^{1/p₀}` against `log r`, per `s`.
    pub slopes: Vec<f64>,
    /// Smallest per-`s` slope: the exponent that works for every probed `s`.
    pub alpha_hat: f64,
    /// `max_r sup_z D^{1/p₀} / r^{α̂}`, per `s`.
    pub phi_hat: Vec<f64>,
    /// Log-log slope of `phi_hat` against `s` (NaN with a single `s`).
    pub phi_s_exponent: f64,
    pub degenerate: bool,
}

fn z_grid_for(drift: &DriftSpec, s: f64) -> Vec<f64> {
    let (a, b) = drift.probe_window;
    let pad = 3.0 * s.sqrt();
    let (lo, hi) = (a - pad, b + pad);
    let n = Z_GRID_POINTS;
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn h2_fit(drift: &DriftSpec, p0: f64, grids: &H2Grids) -> Result<H2Fit> {
    let b = scalar_profile(drift)?;
    if !(p0 >= 2.0) {
        return Err(invalid(format!("p0 must be at least 2, got {p0}")));
    }
    if grids.s_grid.is_empty() {
        return Err(invalid("empty s grid"));
    }
    if grids.r_grid.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
        return Err(invalid("r grid must lie in (0, 1]"));
    }
    let z_grids: Vec<Vec<f64>> = grids
        .s_grid
        .iter()
        .map(|&s| grids.z_grid.clone().unwrap_or_else(|| z_grid_for(drift, s)))
        .collect();

    let mut cells = Vec::new();
    for (si, s) in grids.s_grid.iter().enumerate() {
        for (ri, r) in grids.r_grid.iter().enumerate() {
            for (zi, z) in z_grids[si].iter().enumerate() {
                cells.push((si, ri, zi, *s, *r, *z));
            }
        }
    }
    let values = par_collect(cells.len(), grids.n_workers, |c| {
        let (_, _, _, s, r, z) = cells[c];
        h2_integral_of(b, p0, z, s, r, grids.n_samples, grids.seed, c as u64).map(|e| e.mean)
    })?;

    let mut table: Vec<Vec<Vec<f64>>> = z_grids
        .iter()
        .map(|zg| vec![vec![0.0; zg.len()]; grids.r_grid.len()])
        .collect();
    for (&(si, ri, zi, ..), v) in cells.iter().zip(&values) {
        table[si][ri][zi] = *v;
    }
    let sup_table: Vec<Vec<f64>> = table
        .iter()
        .map(|rows| rows.iter().map(|zs| zs.iter().copied().fold(0.0, f64::max)).collect())
        .collect();

    let degenerate = sup_table.iter().flatten().all(|v| *v == 0.0);
    let mut fit = H2Fit {
        p0,
        s_grid: grids.s_grid.clone(),
        r_grid: grids.r_grid.clone(),
        z_grids,
        integral_table: table,
        sup_table: sup_table.clone(),
        slopes: Vec::new(),
        alpha_hat: f64::NAN,
        phi_hat: Vec::new(),
        phi_s_exponent: f64::NAN,
        degenerate,
    };
    if degenerate {
        return Ok(fit);
    }

    for row in &sup_table {
        let (rs, ds): (Vec<f64>, Vec<f64>) = grids
            .r_grid
            .iter()
            .zip(row)
            .filter(|(_, d)| **d > 0.0)
            .map(|(r, d)| (*r, d.powf(1.0 / p0)))
            .unzip();
        if rs.len() < 3 {
            return Err(Error::Fit(format!(
                "only {} usable r points (need 3)",
                rs.len()
            )));
        }
        let (slope, _) = log_log_line(&rs, &ds).ok_or_else(|| Error::Fit("degenerate r grid".into()))?;
        fit.slopes.push(slope);
    }
    fit.alpha_hat = fit.slopes.iter().copied().fold(f64::INFINITY, f64::min);
    fit.phi_hat = sup_table
        .iter()
        .map(|row| {
            grids
                .r_grid
                .iter()
                .zip(row)
                .map(|(r, d)| d.powf(1.0 / p0) / r.powf(fit.alpha_hat))
                .fold(0.0, f64::max)
        })
        .collect();
    if grids.s_grid.len() >= 2 && fit.phi_hat.iter().all(|v| *v > 0.0) {
        let ls: Vec<f64> = grids.s_grid.iter().map(|s| s.ln()).collect();
        let lp: Vec<f64> = fit.phi_hat.iter().map(|p| p.ln()).collect();
        fit.phi_s_exponent = line(&ls, &lp).map(|(m, _)| m).unwrap_or(f64::NAN);
    }
    Ok(fit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GagliardoEstimate {
    /// `[b]_{W^{β,p}}` with the diagonal band `|x−y| < cutoff` removed.
    pub value: f64,
    pub cutoff: f64,
    /// Same estimate at `cutoff/2`.
    pub value_half_cutoff: f64,
    /// The truncated integral keeps growing as the cutoff shrinks: either
    /// more than doubling per halving, or with increments that do not decay.
    pub diverging: bool,
}

/// Truncated double integral `∫∫_{|x−y|≥h} |b(x)−b(y)|^p / |x−y|^{1+βp}` for
/// a profile vanishing outside `support`.
///
/// Pairs with both points in the support use a midpoint rule on spacing
/// `h/2`; pairs with exactly one point outside reduce to the closed form
/// `∫_{y∉S, |x−y|≥h} |x−y|^{−1−βp} dy` and a 1-d midpoint rule in `x`.
pub fn gagliardo_integral_of<F: Fn(f64) -> f64 + ?Sized>(
    b: &F,
    support: (f64, f64),
    beta: f64,
    p: f64,
    cutoff: f64,
) -> f64 {
    let (a1, a2) = support;
    if a2 <= a1 {
        return 0.0;
    }
    let q = beta * p;
    let h = cutoff / 2.0;
    let n = ((a2 - a1) / h).ceil() as usize;
    let h = (a2 - a1) / n as f64;
    let xs: Vec<f64> = (0..n).map(|i| a1 + (i as f64 + 0.5) * h).collect();
    let bs: Vec<f64> = xs.iter().map(|&x| b(x)).collect();

    let mut inner = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = xs[j] - xs[i];
            if dist < cutoff {
                continue;
            }
            let diff = (bs[i] - bs[j]).abs();
            if diff != 0.0 {
                inner += diff.powf(p) / dist.powf(1.0 + q);
            }
        }
    }
    inner *= 2.0 * h * h;

    let mut outer = 0.0;
    for i in 0..n {
        if bs[i] == 0.0 {
            continue;
        }
        let left = (xs[i] - a1).max(cutoff);
        let right = (a2 - xs[i]).max(cutoff);
        outer += bs[i].abs().powf(p) * (left.powf(-q) + right.powf(-q)) / q;
    }
    outer *= 2.0 * h;
    inner + outer
}

pub fn gagliardo_seminorm(
    drift: &DriftSpec,
    beta: f64,
    p: f64,
    cutoff: Option<f64>,
) -> Result<GagliardoEstimate> {
    let support = compact_support(drift)?;
    let b = scalar_profile(drift)?;
    if !(beta > 0.0) || !(p >= 1.0) {
        return Err(invalid(format!("need beta > 0 and p ≥ 1, got beta={beta}, p={p}")));
    }
    let h = cutoff.unwrap_or(GAGLIARDO_CUTOFF);
    let g1 = gagliardo_integral_of(b, support, beta, p, h);
    let g2 = gagliardo_integral_of(b, support, beta, p, h / 2.0);
    let g3 = gagliardo_integral_of(b, support, beta, p, h / 4.0);
    let growth = if g1 > 0.0 { g2 / g1 } else { 1.0 };
    let increments_decay = (g3 - g2) < (g2 - g1);
    let diverging = g1 > 0.0 && (growth > 2.0 || !increments_decay);
    Ok(GagliardoEstimate {
        value: g1.powf(1.0 / p),
        cutoff: h,
        value_half_cutoff: g2.powf(1.0 / p),
        diverging,
    })
}
