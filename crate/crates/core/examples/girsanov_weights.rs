//! Girsanov weights against the driftless reference path: mean weight and
//! weighted expectations next to direct simulation.

use weak_em::em::em_terminal_batch;
use weak_em::girsanov::{weighted_expectation, WeightVariant};
use weak_em::sim::mean_and_se;
use weak_em::{catalog_get, Params, SigmaSpec, SimConfig};

fn main() -> weak_em::Result<()> {
    let drift = catalog_get("svc", &Params::new())?;
    let sigma = SigmaSpec::identity(1)?;
    let f = |x: &[f64]| x[0].sin();

    let cfg = SimConfig::new(1.0, 1.0 / 256.0, vec![0.5], 50_000, 9);
    for (label, variant) in [
        ("continuous", WeightVariant::Continuous),
        ("frozen δ=1/16", WeightVariant::Frozen { delta: 1.0 / 16.0 }),
    ] {
        let w = weighted_expectation(&drift, &sigma, &cfg, f, variant)?;
        println!(
            "{label:<14} E[R] = {:.4} ± {:.4}   E[R f(Y_T)] = {:.4} ± {:.4}",
            w.mean_weight, w.weight_std_err, w.estimate, w.std_err
        );
    }

    let direct = SimConfig::new(1.0, 1.0 / 16.0, vec![0.5], 50_000, 10);
    let vals: Vec<f64> = em_terminal_batch(&drift, &sigma, &direct)?.iter().map(|x| f(x)).collect();
    let (m, se) = mean_and_se(&vals);
    println!("direct EM δ=1/16             E f(X_T) = {m:.4} ± {se:.4}");
    Ok(())
}
