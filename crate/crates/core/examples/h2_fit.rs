//! Monte Carlo estimate of the Gaussian-smoothed increment exponent.

use weak_em::regularity::{h2_fit, H2Grids};
use weak_em::{catalog_get, Params};

fn main() -> weak_em::Result<()> {
    let grids = H2Grids { n_samples: 50_000, ..H2Grids::default() };
    for (name, params) in [("svc", vec![]), ("indicator", vec![]), ("weierstrass", vec![("beta", 0.6)])] {
        let p: Params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let drift = catalog_get(name, &p)?;
        let fit = h2_fit(&drift, 2.0, &grids)?;
        println!(
            "{:<28} alpha_hat = {:.4}  slopes = {:?}  expected {:?}",
            drift.name(),
            fit.alpha_hat,
            fit.slopes,
            drift.theoretical_alpha
        );
    }
    Ok(())
}
