//! Frozen-weight Girsanov estimate against direct Euler–Maruyama, plus a
//! horizon too long for the exponential moment.

use weak_em::experiment::{girsanov_cross_check, test_function_get, CrossCheckSettings};
use weak_em::{catalog_get, Params, SigmaSpec};

fn main() -> weak_em::Result<()> {
    let sigma = SigmaSpec::identity(1)?;
    let f = test_function_get("sin", &Params::new())?;
    let settings = CrossCheckSettings {
        horizon: 1.0,
        delta: 1.0 / 32.0,
        x0: vec![0.5],
        n_paths: 50_000,
        master_seed: 5,
        n_workers: 1,
    };
    let rec = girsanov_cross_check(&catalog_get("svc", &Params::new())?, &sigma, &f, &settings)?;
    println!(
        "svc: weighted {:.5} ± {:.5}, direct {:.5} ± {:.5}, z = {:.2}, agree = {}",
        rec.weighted, rec.weighted_se, rec.direct, rec.direct_se, rec.z_score, rec.agrees(3.0)
    );

    let p: Params = [("a".to_string(), 0.0), ("lambda".to_string(), 3.0)].into();
    let stiff = catalog_get("linear", &p)?;
    let rec = girsanov_cross_check(&stiff, &sigma, &f, &settings)?;
    println!("{}: skipped = {:?}", rec.drift, rec.skipped);
    Ok(())
}
