//! Fine and coarse Euler–Maruyama paths driven by one Brownian path.

use weak_em::em::em_coupled_grid;
use weak_em::{catalog_get, Params, SigmaSpec, SimConfig};

fn main() -> weak_em::Result<()> {
    let drift = catalog_get("svc", &Params::new())?;
    let sigma = SigmaSpec::identity(1)?;
    let fine = 1.0 / 1024.0;
    let deltas: Vec<f64> = (2..=7).map(|k| (-(k as f64)).exp2()).collect();
    let cfg = SimConfig::new(1.0, fine, vec![0.5], 20_000, 3);
    let batch = em_coupled_grid(&drift, &sigma, &cfg, &deltas)?;

    println!("delta       mean |X_fine - X_coarse|");
    for (delta, level) in deltas.iter().zip(&batch.coarse) {
        let strong = level
            .iter()
            .zip(&batch.fine)
            .map(|(c, f)| (c[0] - f[0]).abs())
            .sum::<f64>()
            / level.len() as f64;
        println!("{delta:<11} {strong:.6}");
    }
    Ok(())
}
