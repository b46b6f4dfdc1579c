//! Horizon conditions for the weak rate and for the exponential moment.

use weak_em::girsanov::{check_lambda_horizon, check_weak_rate_condition, NOVIKOV_LAMBDA};
use weak_em::{catalog_get, Params, SigmaSpec};

fn main() -> weak_em::Result<()> {
    let sigma = SigmaSpec::identity(1)?;
    for (name, params) in [
        ("svc", vec![]),
        ("holder", vec![("beta", 0.5)]),
        ("linear", vec![("a", 0.0), ("lambda", 0.5)]),
        ("linear", vec![("a", 0.0), ("lambda", 2.0)]),
    ] {
        let p: Params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let drift = catalog_get(name, &p)?;
        let l2 = drift.effective_l2();
        let rate = check_weak_rate_condition(1.0, l2, &sigma, 2.0)?;
        let moment = check_lambda_horizon(1.0, NOVIKOV_LAMBDA, l2, &sigma);
        println!(
            "{:<24} L2={l2:<4} max T = {:<10.6} T=1 rate: {:<5} moment: {} (lhs {:.4})",
            drift.name(),
            rate.max_horizon,
            rate.pass,
            moment.pass,
            moment.lhs
        );
    }
    Ok(())
}
