//! Configuration files and the `weak-em` command line.
//!
//! Experiments are described by a TOML file:
//!
//! ```toml
//! horizon = 1.0
//! x0 = [0.5]
//! sigma = "identity 1"
//! n_paths = 200000
//! master_seed = 7
//! output = "runs/svc"
//!
//! [drift]
//! name = "svc"
//! params = { depth = 25 }
//!
//! [f]
//! name = "indicator"
//! params = { c = 0.5 }
//! ```
//!
//! `--seed`, `--workers`, `--out` and `--paths` override the file. Results go
//! to standard output and files; progress goes to standard error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::drift::{svc_interval, svc_locate, SvcLocation, SVC_MAX_LEVEL as MAX_LEVEL};
use crate::drift::{catalog_get, DriftSpec, Params};
use crate::error::{invalid, Error, Result};
use crate::experiment::{
    dyadic_grid, girsanov_cross_check, rate_vs_theory, test_function_get, weak_error_curve,
    CrossCheckSettings, RateReport, RateSettings, TestFunction, Verdict, VerdictKind,
    DEFAULT_BOOTSTRAP, DEFAULT_PATHS,
};
use crate::girsanov::{check_lambda_horizon, check_weak_rate_condition, NOVIKOV_LAMBDA};
use crate::regularity::{h2_fit, modulus_curve, H2Grids};
use crate::sigma::{sigma_analyze, SigmaSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedParams {
    pub name: String,
    #[serde(default)]
    pub params: Params,
}

impl NamedParams {
    pub fn new(name: &str) -> Self {
        NamedParams {
            name: name.to_string(),
            params: Params::new(),
        }
    }
}

/// `"identity d"` or a row-major matrix literal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaConfig {
    Named(String),
    Matrix(Vec<Vec<f64>>),
}

impl Default for SigmaConfig {
    fn default() -> Self {
        SigmaConfig::Named("identity 1".into())
    }
}

impl SigmaConfig {
    pub fn build(&self) -> Result<SigmaSpec> {
        match self {
            SigmaConfig::Named(s) => {
                let mut it = s.split_whitespace();
                match (it.next(), it.next().map(str::parse::<usize>), it.next()) {
                    (Some("identity"), Some(Ok(d)), None) if d > 0 => SigmaSpec::identity(d),
                    _ => Err(invalid(format!(
                        "sigma: expected \"identity <d>\" or a matrix, got {s:?}"
                    ))),
                }
            }
            SigmaConfig::Matrix(rows) => {
                let d = rows.len();
                if d == 0 || rows.iter().any(|r| r.len() != d) {
                    return Err(invalid("sigma: matrix must be square and non-empty"));
                }
                let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                sigma_analyze(&DMatrix::from_row_slice(d, d, &flat))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusOptions {
    /// Shifts `2^{-k}` for `k` in `u_min_exp..=u_max_exp`.
    pub u_min_exp: Option<u32>,
    pub u_max_exp: Option<u32>,
    /// Monte Carlo samples per H2 cell.
    pub h2_samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossCheckOptions {
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckOptions {
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub drift: NamedParams,
    #[serde(default)]
    pub sigma: SigmaConfig,
    pub f: Option<NamedParams>,
    #[serde(alias = "T")]
    pub horizon: f64,
    pub x0: Option<Vec<f64>>,
    pub delta_grid: Option<Vec<f64>>,
    pub delta_min_exp: Option<u32>,
    pub delta_max_exp: Option<u32>,
    pub delta_ref_exp: Option<u32>,
    pub n_paths: Option<usize>,
    #[serde(default)]
    pub master_seed: u64,
    pub n_workers: Option<usize>,
    pub n_bootstrap: Option<usize>,
    pub p0: Option<f64>,
    pub output: Option<PathBuf>,
    pub modulus: Option<ModulusOptions>,
    pub cross_check: Option<CrossCheckOptions>,
    pub check: Option<CheckOptions>,
}

impl ExperimentConfig {
    pub fn new(drift: &str, horizon: f64) -> Self {
        ExperimentConfig {
            drift: NamedParams::new(drift),
            sigma: SigmaConfig::default(),
            f: None,
            horizon,
            x0: None,
            delta_grid: None,
            delta_min_exp: None,
            delta_max_exp: None,
            delta_ref_exp: None,
            n_paths: None,
            master_seed: 0,
            n_workers: None,
            n_bootstrap: None,
            p0: None,
            output: None,
            modulus: None,
            cross_check: None,
            check: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| invalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    pub fn drift_spec(&self) -> Result<DriftSpec> {
        catalog_get(&self.drift.name, &self.drift.params)
    }

    pub fn test_function(&self) -> Result<TestFunction> {
        let f = self
            .f
            .as_ref()
            .ok_or_else(|| invalid("missing [f] section"))?;
        test_function_get(&f.name, &f.params)
    }

    pub fn x0(&self, dim: usize) -> Result<Vec<f64>> {
        let x0 = self.x0.clone().unwrap_or_else(|| vec![0.0; dim]);
        if x0.len() != dim {
            return Err(invalid(format!("x0 has {} entries, dimension is {dim}", x0.len())));
        }
        Ok(x0)
    }

    /// Explicit `delta_grid`, else `T·2^{-k}` over the exponent range
    /// (default 2..=7).
    pub fn deltas(&self) -> Result<Vec<f64>> {
        match (&self.delta_grid, self.delta_min_exp, self.delta_max_exp) {
            (Some(g), None, None) => Ok(g.clone()),
            (Some(_), _, _) => Err(invalid(
                "give either delta_grid or delta_min_exp/delta_max_exp, not both",
            )),
            (None, lo, hi) => {
                let (lo, hi) = (lo.unwrap_or(2), hi.unwrap_or(7));
                if lo > hi {
                    return Err(invalid("delta_min_exp exceeds delta_max_exp"));
                }
                Ok(dyadic_grid(self.horizon, lo, hi))
            }
        }
    }

    pub fn rate_settings(&self, dim: usize) -> Result<RateSettings> {
        let s = RateSettings {
            horizon: self.horizon,
            x0: self.x0(dim)?,
            delta_grid: self.deltas()?,
            delta_ref: self.horizon * (-(self.delta_ref_exp.unwrap_or(10) as f64)).exp2(),
            n_paths: self.n_paths.unwrap_or(DEFAULT_PATHS),
            master_seed: self.master_seed,
            n_workers: self.n_workers.unwrap_or(1),
            n_bootstrap: self.n_bootstrap.unwrap_or(DEFAULT_BOOTSTRAP),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn output_prefix(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from("weak-em"))
    }

    fn p0(&self, drift: &DriftSpec) -> f64 {
        self.p0.or(drift.theoretical_p0).unwrap_or(2.0)
    }
}

#[derive(Debug, Parser)]
#[command(name = "weak-em", version, about = "Euler–Maruyama weak-rate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Overrides {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "SDE_WORKERS")]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    paths: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weak-error curve, rate fit and verdict.
    Rate(Overrides),
    /// Horizon conditions.
    Check(Overrides),
    /// L²-shift modulus curve and H2 exponent.
    Modulus(Overrides),
    /// Evaluates the SVC drift at one point.
    Svc {
        #[arg(allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = 25)]
        depth: u32,
    },
    /// Girsanov-weighted versus direct Euler–Maruyama estimate.
    CrossCheck(Overrides),
}

impl Overrides {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(w) = self.workers {
            cfg.n_workers = Some(w);
        }
        if let Some(o) = &self.out {
            cfg.output = Some(o.clone());
        }
        if let Some(p) = self.paths {
            cfg.n_paths = Some(p);
        }
        Ok(cfg)
    }
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Command::Svc { x, depth } => cmd_svc(*x, *depth).map(|s| {
            println!("{s}");
            EXIT_OK
        }),
        Command::Rate(o) => o.load().and_then(|c| cmd_rate(&c)),
        Command::Check(o) => o.load().and_then(|c| {
            print!("{}", cmd_check(&c)?);
            Ok(EXIT_OK)
        }),
        Command::Modulus(o) => o.load().and_then(|c| cmd_modulus(&c)),
        Command::CrossCheck(o) => o.load().and_then(|c| cmd_cross_check(&c)),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| invalid(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn rate_csv(report: &RateReport) -> String {
    let mut out = String::from("delta,error,ci_low,ci_high,n_paths\n");
    for i in 0..report.delta_grid.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            sci(report.delta_grid[i]),
            sci(report.errors[i]),
            sci(report.ci_low[i]),
            sci(report.ci_high[i]),
            report.n_paths
        );
    }
    out
}

#[derive(Serialize)]
struct RateJson<'a> {
    report: &'a RateReport,
    verdict: &'a Verdict,
}

/// Writes `<prefix>.rate.csv` and `<prefix>.report.json`.
pub fn cmd_rate(cfg: &ExperimentConfig) -> Result<i32> {
    let drift = cfg.drift_spec()?;
    let sigma = cfg.sigma.build()?;
    let f = cfg.test_function()?;
    let settings = cfg.rate_settings(sigma.dim())?;
    eprintln!(
        "rate: drift={} f={} paths={} deltas={}",
        drift.name(),
        f.name(),
        settings.n_paths,
        settings.delta_grid.len()
    );
    let report = weak_error_curve(&drift, &sigma, &f, &settings)?;
    let verdict = rate_vs_theory(&report);
    let prefix = cfg.output_prefix();
    write_file(&with_suffix(&prefix, ".rate.csv"), &rate_csv(&report))?;
    let json = serde_json::to_string_pretty(&RateJson {
        report: &report,
        verdict: &verdict,
    })
    .map_err(|e| invalid(e.to_string()))?;
    write_file(&with_suffix(&prefix, ".report.json"), &(json + "\n"))?;
    let kind = serde_json::to_value(verdict.kind).map_err(|e| invalid(e.to_string()))?;
    println!(
        "verdict={} fitted_rate={} condition_pass={}",
        kind.as_str().unwrap_or("?"),
        report
            .fitted_rate
            .map_or("none".to_string(), |r| format!("{r:.6}")),
        report.condition_pass
    );
    Ok(match verdict.kind {
        VerdictKind::Fail => EXIT_FAIL,
        _ => EXIT_OK,
    })
}

fn pass_word(p: bool) -> &'static str {
    if p {
        "pass"
    } else {
        "fail"
    }
}

/// Condition report, one `key=value` line per condition.
pub fn cmd_check(cfg: &ExperimentConfig) -> Result<String> {
    let drift = cfg.drift_spec()?;
    let sigma = cfg.sigma.build()?;
    if drift.dim() != sigma.dim() {
        return Err(invalid("drift and sigma dimensions differ"));
    }
    let l2 = drift.effective_l2();
    let t = cfg.horizon;
    let thm = check_weak_rate_condition(t, l2, &sigma, cfg.p0(&drift))?;
    let lambda = cfg
        .check
        .as_ref()
        .and_then(|c| c.lambda)
        .unwrap_or(NOVIKOV_LAMBDA);
    let lem = check_lambda_horizon(t, lambda, l2, &sigma);
    let k = 2.0 * lambda * (l2 * sigma.inv_op_norm() * sigma.op_norm()).powi(2);
    let lem_max = if k == 0.0 { f64::INFINITY } else { k.sqrt().recip() };
    Ok(format!(
        "theorem21={} max_horizon={:.6} lhs={:.6} margin={:.6}\n\
         lemma31={} max_horizon={:.6} lhs={:.6} margin={:.6} lambda={:.6}\n",
        pass_word(thm.pass),
        thm.max_horizon,
        thm.lhs,
        thm.max_horizon - t,
        pass_word(lem.pass),
        lem_max,
        lem.lhs,
        lem.margin,
        lambda
    ))
}

/// Writes `<prefix>.modulus.csv`.
pub fn cmd_modulus(cfg: &ExperimentConfig) -> Result<i32> {
    let drift = cfg.drift_spec()?;
    if drift.dim() != 1 {
        return Err(Error::UnsupportedDrift(format!("{} in dimension {}", drift.name(), drift.dim())));
    }
    if drift.is_constant() {
        return Err(invalid(format!("degenerate: drift `{}` is constant", drift.name())));
    }
    let opts = cfg.modulus.clone().unwrap_or_default();
    let (lo, hi) = (opts.u_min_exp.unwrap_or(4), opts.u_max_exp.unwrap_or(10));
    if lo > hi {
        return Err(invalid("u_min_exp exceeds u_max_exp"));
    }
    let u_grid: Vec<f64> = (lo..=hi).rev().map(|k| (-(k as f64)).exp2()).collect();
    let curve = modulus_curve(&drift, &u_grid)?;
    if curve.degenerate {
        return Err(invalid(format!("degenerate: M(u) vanishes for `{}`", drift.name())));
    }
    eprintln!("modulus: h2 fit for {}", drift.name());
    let grids = H2Grids {
        n_samples: opts.h2_samples.unwrap_or(100_000),
        seed: cfg.master_seed,
        n_workers: cfg.n_workers.unwrap_or(1),
        ..H2Grids::default()
    };
    let fit = h2_fit(&drift, cfg.p0(&drift), &grids)?;
    let mut out = String::from("u,m_u,bound_4u\n");
    for (u, m) in curve.shifts.iter().zip(&curve.values) {
        let _ = writeln!(out, "{},{},{}", sci(*u), sci(*m), sci(4.0 * u));
    }
    let _ = writeln!(out, "fitted_exponent,{},", sci(curve.fitted_exponent));
    let _ = writeln!(out, "alpha_hat,{},", sci(fit.alpha_hat));
    write_file(&with_suffix(&cfg.output_prefix(), ".modulus.csv"), &out)?;
    println!(
        "fitted_exponent={:.6} alpha_hat={:.6} linear_bound={}",
        curve.fitted_exponent,
        fit.alpha_hat,
        curve.satisfies_linear_bound(4.0)
    );
    Ok(EXIT_OK)
}

/// `value=… tag=…` line for the SVC drift at `x`.
pub fn cmd_svc(x: f64, depth: u32) -> Result<String> {
    if depth > MAX_LEVEL {
        return Err(Error::DepthLimit {
            level: depth,
            max: MAX_LEVEL,
        });
    }
    Ok(match svc_locate(x, depth)? {
        SvcLocation::Outside => "value=0 tag=outside".to_string(),
        SvcLocation::InSet { .. } => "value=1 tag=A".to_string(),
        SvcLocation::Removed { level, index } => {
            let iv = svc_interval(level, index)?;
            let value = 1.0 - (-((level as u64 + index) as f64)).exp2();
            format!(
                "value={value} tag=I({level},{index}) interval=({},{})",
                iv.left, iv.right
            )
        }
    })
}

pub fn cmd_cross_check(cfg: &ExperimentConfig) -> Result<i32> {
    let drift = cfg.drift_spec()?;
    let sigma = cfg.sigma.build()?;
    let f = cfg.test_function()?;
    let delta = cfg
        .cross_check
        .as_ref()
        .and_then(|c| c.delta)
        .unwrap_or(cfg.horizon / 32.0);
    let settings = CrossCheckSettings {
        horizon: cfg.horizon,
        delta,
        x0: cfg.x0(sigma.dim())?,
        n_paths: cfg.n_paths.unwrap_or(100_000),
        master_seed: cfg.master_seed,
        n_workers: cfg.n_workers.unwrap_or(1),
    };
    let rec = girsanov_cross_check(&drift, &sigma, &f, &settings)?;
    if let Some(reason) = &rec.skipped {
        println!("skipped=true reason={reason:?}");
        return Ok(EXIT_OK);
    }
    let agree = rec.agrees(3.0);
    println!(
        "weighted={} weighted_se={} direct={} direct_se={} z={:.6} agree={agree}",
        sci(rec.weighted),
        sci(rec.weighted_se),
        sci(rec.direct),
        sci(rec.direct_se),
        rec.z_score
    );
    Ok(if agree { EXIT_OK } else { EXIT_FAIL })
}
