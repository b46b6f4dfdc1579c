//! Euler–Maruyama weak-error experiments for SDEs with irregular drifts.
//!
//! The crate simulates `dX_t = b(X_t)dt + σ dW_t` with additive noise and
//! its Euler–Maruyama approximation, checks the horizon conditions under
//! which the weak error `|E f(X_T) − E f(X_T^{(δ)})|` decays like `δ^α`,
//! and measures that decay empirically.
//!
//! * [`drift`]: drift catalog, including the discontinuous
//!   Smith–Volterra–Cantor drift with exact dyadic bookkeeping.
//! * [`em`]: single, batched, and coupled fine/coarse path simulation.
//! * [`girsanov`]: Radon–Nikodym weights against `Y = x + σW`, weighted
//!   estimators and the horizon checks.
//! * [`regularity`]: numerical checks of the drift regularity condition.
//! * [`experiment`]: weak-error curves, rate fits and verdicts.
//! * [`cli`]: configuration files and the `weak-em` command line.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod cli;
pub mod drift;
pub mod em;
pub mod error;
pub mod experiment;
pub mod girsanov;
pub mod grid;
pub mod regularity;
pub mod sigma;
pub mod sim;
pub mod stats;
pub mod stream;

pub use drift::{catalog_get, DriftSpec, Params};
pub use error::{Error, Result};
pub use grid::{make_time_grid, TimeGrid};
pub use sigma::{sigma_analyze, SigmaSpec};
pub use sim::SimConfig;
