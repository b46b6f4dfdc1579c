use std::fmt;
use std::sync::Arc;

use crate::drift::Params;
use crate::error::{Error, Result};

pub type Observable = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Bounded measurable observable `f`. Catalog members read the first
/// coordinate.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    evaluator: Observable,
    /// `‖f‖_∞`
    pub bound: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("bound", &self.bound)
            .finish()
    }
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        bound: f64,
        evaluator: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TestFunction {
            name: name.into(),
            evaluator: Arc::new(evaluator),
            bound,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.evaluator)(x)
    }

    /// `k·f`
    pub fn scaled(&self, k: f64) -> TestFunction {
        let inner = self.evaluator.clone();
        TestFunction {
            name: format!("{}*{}", k, self.name),
            evaluator: Arc::new(move |x| k * inner(x)),
            bound: k.abs() * self.bound,
        }
    }
}

/// `indicator` (`c` = 0): `𝟙_{x>c}`; `sin`; `clamp` (`a` = 1):
/// `max(−a, min(a, x))`; `sign`.
pub fn test_function_get(name: &str, params: &Params) -> Result<TestFunction> {
    let allowed: &[&str] = match name {
        "indicator" => &["c"],
        "clamp" => &["a"],
        "sin" | "sign" => &[],
        other => return Err(Error::Catalog(format!("unknown test function `{other}`"))),
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Catalog(format!(
            "unknown parameter `{k}` for test function `{name}`"
        )));
    }
    Ok(match name {
        "indicator" => {
            let c = params.get("c").copied().unwrap_or(0.0);
            TestFunction::new(format!("indicator({c})"), 1.0, move |x| {
                (x[0] > c) as u8 as f64
            })
        }
        "clamp" => {
            let a = params.get("a").copied().unwrap_or(1.0);
            if !(a > 0.0) {
                return Err(Error::Catalog(format!("clamp level must be positive, got {a}")));
            }
            TestFunction::new(format!("clamp({a})"), a, move |x| x[0].clamp(-a, a))
        }
        "sin" => TestFunction::new("sin", 1.0, |x| x[0].sin()),
        _ => TestFunction::new("sign", 1.0, |x| {
            if x[0] > 0.0 {
                1.0
            } else if x[0] < 0.0 {
                -1.0
            } else {
                0.0
            }
        }),
    })
}
