//! Re-runs the bias bootstrap on one dataset to measure the simulation
//! variance of the corrected estimators.
//!
//! Run with `cargo run --release --example variance_check`.

use warpboot::harness::DataGenerator;
use warpboot::oracle::mc_variance_check;
use warpboot::{BootstrapPlan, Cube, SeedPath};

fn main() -> warpboot::Result<()> {
    let ds = DataGenerator::exponential_mean_two().generate(50, 4, SeedPath::data(0))?;
    let plan = BootstrapPlan::new(200, 1, 17)?;
    let check = mc_variance_check(&ds, &Cube, &plan, 1000, &[1, 4, 64])?;
    println!(
        "B n var(single) {:.2}, plug-in tau^2 {:.2}",
        check.scaled_single(),
        check.tau_sq_hat
    );
    for d in &check.doubles {
        println!(
            "C={:<3} var(double)/var(single) {:.3} (about {:.3})",
            d.inner,
            d.ratio,
            4.0 + 1.0 / d.inner as f64
        );
    }
    Ok(())
}
