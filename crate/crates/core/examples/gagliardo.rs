//! Truncated Gagliardo seminorms of compactly supported drifts.

use weak_em::regularity::gagliardo_seminorm;
use weak_em::{catalog_get, Params};

fn main() -> weak_em::Result<()> {
    let svc: Params = [("depth".to_string(), 12.0)].into();
    for (name, p) in [("indicator", Params::new()), ("svc", svc)] {
        let drift = catalog_get(name, &p)?;
        for beta in [0.2, 0.4, 0.6] {
            let g = gagliardo_seminorm(&drift, beta, 2.0, None)?;
            println!(
                "{name:<10} beta={beta}  value={:.4}  half cutoff={:.4}  diverging={}",
                g.value, g.value_half_cutoff, g.diverging
            );
        }
    }
    Ok(())
}
