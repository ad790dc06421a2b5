//! A user-defined functional, and the built-in ratio of means on two
//! independent samples of different sizes.
//!
//! Run with `cargo run --release --example custom_functional`.

use warpboot::{
    bc_double, bc_single, conventional_calibrated_interval, run_bias_bootstrap, BootstrapPlan,
    Dataset, DependenceModel, PointEstimate, Ratio, RootKind, Side, SmoothFunctional,
};

/// `log(mu)`
struct LogMean;

impl SmoothFunctional for LogMean {
    fn arity(&self) -> usize {
        1
    }

    fn value(&self, x: &[f64]) -> f64 {
        x[0].ln()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out[0] = 1.0 / x[0];
    }

    fn name(&self) -> String {
        "log-mean".into()
    }
}

fn main() -> warpboot::Result<()> {
    let waits = vec![0.8, 2.9, 1.1, 0.4, 3.7, 1.9, 0.6, 2.2, 5.1, 1.3, 0.9, 2.6];
    let ds = Dataset::univariate(waits.clone())?;
    let plan = BootstrapPlan::new(1000, 20, 3)?;
    let run = run_bias_bootstrap(&ds, &LogMean, &plan)?;
    println!(
        "log-mean: theta_hat {:.4}, single {:.4}, double {:.4}",
        run.theta_hat,
        bc_single(&run),
        bc_double(&run)?
    );

    // treatment and control arms, sampled independently
    let arms = Dataset::new(
        DependenceModel::ComponentwiseIndependent,
        vec![waits, vec![1.5, 2.1, 0.7, 1.8, 2.4, 1.2, 3.3, 0.9]],
    )?;
    let pe = PointEstimate::of(&Ratio, &arms)?;
    println!(
        "ratio of means {:.4} (sigma_hat {:.4}, n_eff {})",
        pe.theta, pe.sigma, pe.n_eff
    );
    let run = run_bias_bootstrap(&arms, &Ratio, &plan)?;
    println!(
        "bias corrected: single {:.4}, double {:.4}",
        bc_single(&run),
        bc_double(&run)?
    );
    let cal = conventional_calibrated_interval(
        &arms,
        &Ratio,
        &plan.with_root_kind(RootKind::PercentileT),
        0.9,
        Side::TwoSided,
    )?;
    println!(
        "90% calibrated interval ({:.4}, {:.4}) at nominal level {:.3}",
        cal.interval.lower, cal.interval.upper, cal.level
    );
    Ok(())
}
