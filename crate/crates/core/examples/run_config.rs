//! Runs a config file through the experiment runner.
//!
//! `cargo run --example run_config -- crates/core/configs/ssv.conf`

use std::path::PathBuf;

use exchmat::runner::{run_experiment, ExperimentConfig};

fn main() -> exchmat::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/moments_oracle.conf"));
    let mut config = ExperimentConfig::from_file(&path)?;
    config.output_dir = std::env::temp_dir().join("exchmat-example");
    println!("{}", config.to_text());
    let report = run_experiment(&config)?;
    for file in &report.artifact_paths {
        println!("wrote {}", file.display());
    }
    println!("{}", report.summary.to_json());
    Ok(())
}
