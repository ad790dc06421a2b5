//! Warp-speed calibrated percentile-t interval for a mean.
//!
//! Run with `cargo run --release --example warp_speed_interval`.

use warpboot::harness::DataGenerator;
use warpboot::{
    single_bootstrap_interval, warp_speed_calibrated_interval, BootstrapPlan, Identity, RootKind,
    SeedPath, Side,
};

fn main() -> warpboot::Result<()> {
    let ds = DataGenerator::exponential_mean_two().generate(20, 3, SeedPath::data(0))?;
    let plan = BootstrapPlan::warp_speed(2000, 5)?.with_root_kind(RootKind::PercentileT);

    for side in [Side::Upper, Side::TwoSided] {
        let single = single_bootstrap_interval(&ds, &Identity, &plan, 0.9, side)?;
        let cal = warp_speed_calibrated_interval(&ds, &Identity, &plan, 0.9, side)?;
        println!(
            "{:>9}: single    ({:.4}, {:.4})",
            side.label(),
            single.lower,
            single.upper
        );
        println!(
            "{:>9}: warp-speed ({:.4}, {:.4}) at level {:.4}, estimated coverage {:.3}{}",
            side.label(),
            cal.interval.lower,
            cal.interval.upper,
            cal.level,
            cal.estimated_coverage,
            if cal.out_of_range {
                " (level out of range)"
            } else {
                ""
            }
        );
    }
    Ok(())
}
