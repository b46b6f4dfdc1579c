//! Weak-error curve, fitted rate and verdict for a discontinuous drift.
//!
//! ```text
//! cargo run --release --example weak_rate -- 100000
//! ```

use weak_em::experiment::{rate_vs_theory, test_function_get, weak_error_curve, RateSettings};
use weak_em::{catalog_get, Params, SigmaSpec};

fn main() -> weak_em::Result<()> {
    let n_paths = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(50_000);
    let drift = catalog_get("svc", &Params::new())?;
    let sigma = SigmaSpec::identity(1)?;
    let f = test_function_get("indicator", &[("c".to_string(), 0.5)].into())?;
    let mut settings = RateSettings::with_defaults(1.0, vec![0.5], 7);
    settings.n_paths = n_paths;

    let report = weak_error_curve(&drift, &sigma, &f, &settings)?;
    println!("delta      error      95% CI");
    for i in 0..report.delta_grid.len() {
        println!(
            "{:<10} {:<10.6} [{:.6}, {:.6}]{}",
            report.delta_grid[i],
            report.errors[i],
            report.ci_low[i],
            report.ci_high[i],
            if report.in_fit[i] { "" } else { "  (not fitted)" }
        );
    }
    let v = rate_vs_theory(&report);
    println!("rate {:?} CI {:?}: {:?} {}", report.fitted_rate, report.fitted_rate_ci, v.kind, v.reason);
    Ok(())
}
