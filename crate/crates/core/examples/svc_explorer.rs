//! Walks the Smith–Volterra–Cantor drift: removed intervals, exact
//! locations and values.
//!
//! ```text
//! cargo run --example svc_explorer -- 0.5 0.1875 0.3
//! ```

use weak_em::drift::{svc_eval, svc_locate, svc_removed_intervals, SvcLocation};

fn main() -> weak_em::Result<()> {
    for level in 1..=3 {
        let ivs = svc_removed_intervals(level)?;
        let shown: Vec<String> = ivs.iter().map(|iv| format!("({}, {})", iv.left, iv.right)).collect();
        println!("level {level}: {}", shown.join(" "));
    }

    let mut xs: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if xs.is_empty() {
        xs = vec![0.5, 0.1875, 0.0, 1.0, 0.3, -0.25];
    }
    for x in xs {
        let tag = match svc_locate(x, 25)? {
            SvcLocation::Outside => "outside".to_string(),
            SvcLocation::InSet { .. } => "in A".to_string(),
            SvcLocation::Removed { level, index } => format!("I({level},{index})"),
        };
        println!("b({x}) = {} [{tag}]", svc_eval(x, 25)?);
    }
    Ok(())
}
