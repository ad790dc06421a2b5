//! Conventional double-bootstrap calibration, with C inner resamples per
//! outer resample, next to the warp-speed shortcut on the same draws.
//!
//! Run with `cargo run --release --example conventional_interval`.

use warpboot::harness::DataGenerator;
use warpboot::interval::{calibrate_conventional, calibrate_warp_speed, draw_nested, RootSample};
use warpboot::{sqrt_rule_inner, BootstrapPlan, Identity, RootKind, SeedPath, Side};

fn main() -> warpboot::Result<()> {
    let ds = DataGenerator::LogNormal.generate(25, 8, SeedPath::data(0))?;
    let outer = 500;
    let c = sqrt_rule_inner(outer);
    let plan = BootstrapPlan::new(outer, c, 21)?;
    let draws = draw_nested(&ds, &Identity, &plan)?;

    for kind in [RootKind::Percentile, RootKind::PercentileT] {
        let conv =
            calibrate_conventional(&RootSample::from_draws(&draws, kind), 0.9, Side::TwoSided)?;
        // the first inner resample of every b is exactly a warp-speed run
        let warp = calibrate_warp_speed(
            &RootSample::from_draws(&draws.first_inner(), kind),
            0.9,
            Side::TwoSided,
        )?;
        println!(
            "{:<12} conventional C={c}: ({:.4}, {:.4}) level {:.4} | warp-speed: ({:.4}, {:.4}) level {:.4}",
            kind.label(),
            conv.interval.lower,
            conv.interval.upper,
            conv.level,
            warp.interval.lower,
            warp.interval.upper,
            warp.level
        );
    }
    Ok(())
}
