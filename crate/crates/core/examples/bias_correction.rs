//! Single and double bootstrap bias correction of `mu^3` on exponential data.
//!
//! Run with `cargo run --release --example bias_correction`.

use warpboot::harness::DataGenerator;
use warpboot::oracle::{analytic_bias, MomentSet};
use warpboot::{
    bc_double, bc_single, bias_estimate, run_bias_bootstrap, BiasBootstrap, BiasKind,
    BootstrapPlan, Cube, SeedPath,
};

fn main() -> warpboot::Result<()> {
    let n = 20;
    let ds = DataGenerator::exponential_mean_two().generate(n, 7, SeedPath::data(0))?;
    let plan = BootstrapPlan::new(400, 10, 11)?;

    let run = run_bias_bootstrap(&ds, &Cube, &plan)?;
    println!("theta_hat          {:.4}", run.theta_hat);
    println!(
        "single bias        {:.4}",
        bias_estimate(&run, BiasKind::Single)?
    );
    println!(
        "double bias (C=10) {:.4}",
        bias_estimate(&run, BiasKind::Double)?
    );
    println!(
        "corrected          {:.4} / {:.4}",
        bc_single(&run),
        bc_double(&run)?
    );

    let pop = MomentSet::population(2.0, 4.0, 16.0);
    println!("population bias    {:.4}", analytic_bias(&Cube, &pop, n)?);

    // smaller C for free: inner draws do not depend on C
    let runs = BiasBootstrap::new(&ds, &Cube, plan)
        .inner_counts(&[1, 2, 5, 10])
        .run()?;
    for r in &runs {
        println!(
            "C={:<3} double bias {:.4}",
            r.inner_count,
            bias_estimate(r, BiasKind::Double)?
        );
    }
    Ok(())
}
