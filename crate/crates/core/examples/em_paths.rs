//! Euler–Maruyama on the Ornstein–Uhlenbeck drift `b(x) = −x`.

use weak_em::em::{em_path, em_terminal_batch};
use weak_em::sim::mean_and_se;
use weak_em::stream::path_stream;
use weak_em::{catalog_get, Params, SigmaSpec, SimConfig};

fn main() -> weak_em::Result<()> {
    let p: Params = [("a".into(), 0.0), ("lambda".into(), 1.0)].into();
    let drift = catalog_get("linear", &p)?;
    let sigma = SigmaSpec::identity(1)?;

    let mut cfg = SimConfig::new(1.0, 0.125, vec![1.0], 1, 42);
    cfg.record_trajectory = true;
    let path = em_path(&drift, &sigma, &cfg, &mut path_stream(42, 0))?;
    for x in path.trajectory.unwrap() {
        print!("{:+.4} ", x[0]);
    }
    println!();

    for step in [0.25, 0.0625, 1.0 / 256.0] {
        let cfg = SimConfig::new(1.0, step, vec![1.0], 100_000, 1);
        let xs: Vec<f64> = em_terminal_batch(&drift, &sigma, &cfg)?.into_iter().map(|x| x[0]).collect();
        let (m, se) = mean_and_se(&xs);
        println!("step {step:<10} E X_T ≈ {m:.5} ± {se:.5}   (exact {:.5})", (-1f64).exp());
    }
    Ok(())
}
