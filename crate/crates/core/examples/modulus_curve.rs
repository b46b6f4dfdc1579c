//! The L² shift modulus `‖b(·+u) − b‖₂` for discontinuous drifts.

use weak_em::regularity::modulus_curve;
use weak_em::{catalog_get, Params};

fn main() -> weak_em::Result<()> {
    let us: Vec<f64> = (1..=10).map(|k| (-(k as f64)).exp2()).collect();
    for name in ["indicator", "svc"] {
        let curve = modulus_curve(&catalog_get(name, &Params::new())?, &us)?;
        println!("{name}: M(u) ≈ {:.4}·u^{:.4}", curve.fitted_constant, curve.fitted_exponent);
        for (u, m) in curve.shifts.iter().zip(&curve.values) {
            println!("  u = {u:<12} M = {m:.6}  4u = {:.6}", 4.0 * u);
        }
    }
    Ok(())
}
