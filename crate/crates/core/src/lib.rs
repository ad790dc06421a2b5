//! Bias-corrected and coverage-calibrated bootstrap estimates for smooth
//! functions of means, with the warp-speed (one inner resample per outer
//! resample) shortcut for the double bootstrap.
//!
//! Start with [`Dataset`], a [`SmoothFunctional`] and a [`BootstrapPlan`], then
//! call [`run_bias_bootstrap`] for bias correction or one of the interval
//! functions in [`interval`].

pub mod bias;
pub mod ecdf;
pub mod error;
pub mod estimate;
pub mod functional;
pub mod harness;
pub mod interval;
pub mod model;
pub mod oracle;
pub mod resample;
pub mod rng;
pub mod sum;

pub use bias::{
    bc_double, bc_single, bias_corrected, bias_estimate, run_bias_bootstrap, run_single_bootstrap,
    BiasBootstrap, BiasKind, BiasRun,
};
pub use ecdf::{order_index, quantile, EmpiricalCdf};
pub use error::{Error, Result};
pub use estimate::{sample_moments, sigma_hat, theta_hat, PointEstimate, SampleMoments};
pub use functional::{Cube, Identity, Polynomial, Ratio, Sine, SmoothFunctional};
pub use interval::{
    calibrate_conventional, calibrate_warp_speed, compute_roots, conventional_calibrated_interval,
    draw_nested, single_bootstrap_interval, single_interval, warp_speed_calibrated_interval,
    Calibration, Interval, NestedDraws, RootSample, Side,
};
pub use model::{sqrt_rule_inner, BootstrapPlan, Dataset, DependenceModel, RootKind};
pub use resample::{draw_inner, draw_outer, resample_mean, resample_moments, Resample};
pub use rng::{SeedPath, Stream};
