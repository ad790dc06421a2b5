//! Coverage of single, conventional double and warp-speed intervals for the
//! mean of exponential data.
//!
//! Run with `cargo run --release --example coverage_study [trials]`.

use warpboot::harness::{run_coverage_experiment, BRule, CSpec, ExperimentConfig, ExperimentKind};

fn main() -> warpboot::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(400);
    let cfg = ExperimentConfig {
        b: BRule::Fixed(vec![200]),
        c: vec![CSpec::Fixed(20), CSpec::sqrt_rule()],
        trials,
        ..ExperimentConfig::desk(ExperimentKind::Coverage)
    };
    println!(
        "{:<13} {:<10} {:<20} {:>4} {:>8} {:>8}",
        "root", "side", "method", "C", "coverage", "se"
    );
    for r in run_coverage_experiment(&cfg)? {
        println!(
            "{:<13} {:<10} {:<20} {:>4} {:>8.4} {:>8.4}",
            r.root_kind,
            r.side,
            r.method,
            r.c,
            r.coverage,
            r.mc_se.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
