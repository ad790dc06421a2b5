//! Bias table for `mu^3` and `sin(mu)` at n = 20, printed as CSV. Ratios
//! are against the closed-form bias.
//!
//! Run with `cargo run --release --example table1 [trials]`.

use warpboot::harness::{emit, run_bias_experiment, ExperimentConfig, ExperimentKind};

fn main() -> warpboot::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(300);
    let cfg = ExperimentConfig {
        n: vec![20],
        trials,
        ..ExperimentConfig::desk(ExperimentKind::Bias)
    };
    let rows = run_bias_experiment(&cfg)?;
    emit(&rows, cfg.format, std::io::stdout().lock())
}
