//! Drift functions and their growth metadata.
//!
//! Every catalog member is a scalar profile applied coordinate-wise, so it
//! works in any dimension. For a profile with `|g(y)| ≤ l₁ + l₂|y|` the
//! vector field satisfies `|b(x)| ≤ √d·l₁ + l₂|x|`, which is what the
//! metadata records.

mod dyadic;
mod holder;
mod svc;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use dyadic::Dyadic;
pub use holder::{holder_eval, HolderDrift, LacunaryHolder};
pub use svc::{
    svc_eval, svc_interval, svc_locate, svc_removed_intervals, SvcDrift, SvcInterval,
    SvcLocation, DEFAULT_DEPTH as SVC_DEFAULT_DEPTH, MAX_LEVEL as SVC_MAX_LEVEL,
};

use crate::error::{Error, Result};

pub type VectorField = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
pub type ScalarProfile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub type Params = BTreeMap<String, f64>;

pub const CATALOG: &[&str] = &["zero", "linear", "holder", "weierstrass", "indicator", "svc"];

#[derive(Clone)]
pub struct DriftSpec {
    name: String,
    dim: usize,
    field: VectorField,
    profile: Option<ScalarProfile>,
    pub l1: f64,
    pub l2: f64,
    pub bounded: bool,
    pub sublinear: bool,
    pub theoretical_alpha: Option<f64>,
    pub theoretical_p0: Option<f64>,
    /// The scalar profile vanishes outside this interval.
    pub support: Option<(f64, f64)>,
    /// Interval over which the profile's irregularity lives; used to place
    /// probe centers.
    pub probe_window: (f64, f64),
    identically_zero: bool,
    constant: bool,
}

impl fmt::Debug for DriftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriftSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("l1", &self.l1)
            .field("l2", &self.l2)
            .field("bounded", &self.bounded)
            .field("sublinear", &self.sublinear)
            .field("theoretical_alpha", &self.theoretical_alpha)
            .field("theoretical_p0", &self.theoretical_p0)
            .field("support", &self.support)
            .finish()
    }
}

impl DriftSpec {
    /// A general vector field with no growth guarantees attached; callers
    /// set the metadata fields they can vouch for.
    pub fn from_field(
        name: impl Into<String>,
        dim: usize,
        field: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        DriftSpec {
            name: name.into(),
            dim,
            field: Arc::new(field),
            profile: None,
            l1: f64::INFINITY,
            l2: f64::INFINITY,
            bounded: false,
            sublinear: false,
            theoretical_alpha: None,
            theoretical_p0: None,
            support: None,
            probe_window: (-1.0, 1.0),
            identically_zero: false,
            constant: false,
        }
    }

    /// Applies a scalar profile to each coordinate.
    pub fn componentwise(
        name: impl Into<String>,
        dim: usize,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let profile: ScalarProfile = Arc::new(profile);
        let g = profile.clone();
        let mut spec = Self::from_field(name, dim, move |x: &[f64], out: &mut [f64]| {
            for (o, &xi) in out.iter_mut().zip(x) {
                *o = g(xi);
            }
        });
        spec.profile = Some(profile);
        spec
    }

    pub fn with_growth(mut self, l1: f64, l2: f64) -> Self {
        self.l1 = l1;
        self.l2 = l2;
        self.bounded = l2 == 0.0;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        (self.field)(x, out)
    }

    /// The scalar profile, for 1-d regularity work.
    pub fn profile(&self) -> Option<&ScalarProfile> {
        self.profile.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.identically_zero
    }

    /// Spatially constant, so every modulus of continuity vanishes.
    pub fn is_constant(&self) -> bool {
        self.identically_zero || self.constant
    }

    /// Linear-growth constant to use in the horizon conditions. Bounded and
    /// sublinear drifts admit any `L₂ > 0`, which makes the conditions hold
    /// for every horizon; this is reported as `0`.
    pub fn effective_l2(&self) -> f64 {
        if self.bounded || self.sublinear {
            0.0
        } else {
            self.l2
        }
    }
}

struct ParamReader<'a> {
    name: &'a str,
    params: &'a Params,
    used: Vec<&'static str>,
}

impl<'a> ParamReader<'a> {
    fn new(name: &'a str, params: &'a Params) -> Self {
        ParamReader {
            name,
            params,
            used: Vec::new(),
        }
    }

    fn get(&mut self, key: &'static str, default: f64) -> f64 {
        self.used.push(key);
        self.params.get(key).copied().unwrap_or(default)
    }

    fn dim(&mut self) -> Result<usize> {
        let d = self.get("dim", 1.0);
        if d < 1.0 || d.fract() != 0.0 {
            return Err(Error::Catalog(format!("dim must be a positive integer, got {d}")));
        }
        Ok(d as usize)
    }

    fn finish(self) -> Result<()> {
        for key in self.params.keys() {
            if !self.used.contains(&key.as_str()) {
                return Err(Error::Catalog(format!(
                    "unknown parameter `{key}` for drift `{}`",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Looks up a drift by name.
///
/// | name | params (defaults) |
/// |------|-------------------|
/// | `zero` | `dim` (1) |
/// | `linear` | `a` (0), `lambda` (1), `dim`; `b(x) = a − λx` |
/// | `holder` | `beta` (0.5), `scale` (1), `center` (0), `dim` |
/// | `weierstrass` | `beta` (0.5), `scale` (1), `center` (0), `terms` (16), `dim` |
/// | `indicator` | `a1` (0), `a2` (1), `dim`; `𝟙_{(a₁,a₂)}` |
/// | `svc` | `depth` (25), `dim` |
pub fn catalog_get(name: &str, params: &Params) -> Result<DriftSpec> {
    let mut p = ParamReader::new(name, params);
    let spec = match name {
        "zero" => {
            let dim = p.dim()?;
            let mut s = DriftSpec::componentwise("zero", dim, |_| 0.0).with_growth(0.0, 0.0);
            s.support = Some((0.0, 0.0));
            s.identically_zero = true;
            s
        }
        "linear" => {
            let a = p.get("a", 0.0);
            let lambda = p.get("lambda", 1.0);
            let dim = p.dim()?;
            let mut s = DriftSpec::componentwise("linear", dim, move |x| a - lambda * x)
                .with_growth(a.abs() * (dim as f64).sqrt(), lambda.abs());
            // Lipschitz, hence β = 1 Hölder
            s.theoretical_alpha = Some(0.5);
            s.theoretical_p0 = Some(2.0);
            s.identically_zero = a == 0.0 && lambda == 0.0;
            s.constant = lambda == 0.0;
            s
        }
        "holder" => {
            let h = HolderDrift {
                beta: p.get("beta", 0.5),
                scale: p.get("scale", 1.0),
                center: p.get("center", 0.0),
            };
            let dim = p.dim()?;
            check_beta(h.beta, true)?;
            let root_d = (dim as f64).sqrt();
            // |x−c|^β ≤ 1 + |x−c| ≤ 1 + |c| + |x|
            let mut s = DriftSpec::componentwise("holder", dim, move |x| holder_eval(&h, x))
                .with_growth(root_d * h.scale.abs() * (1.0 + h.center.abs()), h.scale.abs());
            s.bounded = false;
            s.sublinear = h.beta < 1.0;
            s.theoretical_alpha = Some(h.beta / 2.0);
            s.theoretical_p0 = Some(2.0);
            s.probe_window = (h.center - 1.0, h.center + 1.0);
            s.identically_zero = h.scale == 0.0;
            s
        }
        "weierstrass" => {
            let w = LacunaryHolder {
                beta: p.get("beta", 0.5),
                scale: p.get("scale", 1.0),
                center: p.get("center", 0.0),
                terms: p.get("terms", 16.0) as u32,
            };
            let dim = p.dim()?;
            check_beta(w.beta, false)?;
            if w.terms == 0 {
                return Err(Error::Catalog("terms must be positive".into()));
            }
            let mut s = DriftSpec::componentwise("weierstrass", dim, move |x| w.eval(x))
                .with_growth((dim as f64).sqrt() * w.sup_bound().abs(), 0.0);
            s.sublinear = true;
            s.theoretical_alpha = Some(w.beta / 2.0);
            s.theoretical_p0 = Some(2.0);
            s.probe_window = (w.center, w.center + std::f64::consts::TAU);
            s.identically_zero = w.scale == 0.0;
            s
        }
        "indicator" => {
            let a1 = p.get("a1", 0.0);
            let a2 = p.get("a2", 1.0);
            let dim = p.dim()?;
            if !(a1 < a2) {
                return Err(Error::Catalog(format!("indicator needs a1 < a2, got ({a1}, {a2})")));
            }
            let mut s = DriftSpec::componentwise("indicator", dim, move |x| {
                (x > a1 && x < a2) as u8 as f64
            })
            .with_growth((dim as f64).sqrt(), 0.0);
            s.theoretical_alpha = Some(0.25);
            s.theoretical_p0 = Some(2.0);
            s.support = Some((a1, a2));
            s.probe_window = (a1, a2);
            s
        }
        "svc" => {
            let depth = p.get("depth", SVC_DEFAULT_DEPTH as f64);
            let dim = p.dim()?;
            if depth < 1.0 || depth.fract() != 0.0 {
                return Err(Error::Catalog(format!("depth must be a positive integer, got {depth}")));
            }
            let svc = SvcDrift::new(depth as u32)?;
            let mut s = DriftSpec::componentwise("svc", dim, move |x| svc.eval(x))
                .with_growth((dim as f64).sqrt(), 0.0);
            s.theoretical_alpha = Some(0.25);
            s.theoretical_p0 = Some(2.0);
            s.support = Some((0.0, 1.0));
            s.probe_window = (0.0, 1.0);
            s
        }
        other => return Err(Error::Catalog(format!("unknown drift `{other}`"))),
    };
    p.finish()?;
    Ok(spec)
}

fn check_beta(beta: f64, allow_one: bool) -> Result<()> {
    let ok = beta > 0.0 && (beta < 1.0 || (allow_one && beta == 1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::Catalog(format!("beta = {beta} out of range")))
    }
}
