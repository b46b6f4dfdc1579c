//! Loads a TOML experiment file and prints the condition report, the same
//! path the `weak-em` binary takes.
//!
//! ```text
//! cargo run --example run_config -- crates/core/examples/configs/ou_rate.toml
//! ```

use std::path::PathBuf;

use weak_em::cli::{cmd_check, ExperimentConfig};

fn main() -> weak_em::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/ou_rate.toml"));
    let cfg = ExperimentConfig::load(&path)?;
    println!("drift {} on [0, {}], deltas {:?}", cfg.drift.name, cfg.horizon, cfg.deltas()?);
    print!("{}", cmd_check(&cfg)?);
    println!("{}", cfg.to_toml()?);
    Ok(())
}
