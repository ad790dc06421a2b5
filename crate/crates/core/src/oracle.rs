//! Closed-form reference values for univariate functionals: the two-term bias
//! expansion, the ideal (infinite `B`, `C`) bias-corrected values, `tau^2`,
//! and a Monte Carlo check of the simulation variance of the corrected
//! estimators.
//!
//! With `f^(r)` the `r`-th derivative at the mean `mu`:
//!
//! ```text
//! gamma_2 = sigma^2 f''      gamma_3 = mu_3 f'''      gamma_4 = 3 sigma^4 f''''
//! E(theta_hat) - theta = gamma_2 / (2n) + (gamma_3 / 6 + gamma_4 / 24) / n^2 + O(n^-3)
//! ```
//!
//! The plug-in versions `eta_r` replace population moments by sample moments
//! (divisor `n`) and evaluate the derivatives at `X_bar`.

use rayon::prelude::*;

use crate::bias::{bias_corrected, BiasBootstrap, BiasKind};
use crate::error::{Error, Result};
use crate::estimate::{sample_moments, sigma_hat};
use crate::functional::SmoothFunctional;
use crate::model::{BootstrapPlan, Dataset};
use crate::sum::sample_variance;

/// Mean and central moments of a univariate law or sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub mean: f64,
    /// `xi_11 = sigma^2`
    pub variance: f64,
    /// `xi_111 = mu_3`
    pub third: f64,
}

impl MomentSet {
    pub fn population(mean: f64, variance: f64, third: f64) -> Self {
        debug_assert!(variance >= 0.0);
        MomentSet {
            mean,
            variance,
            third,
        }
    }

    /// Plug-in moments of a univariate dataset (divisor `n`).
    pub fn empirical(ds: &Dataset) -> Result<Self> {
        if ds.dim() != 1 {
            return Err(Error::Unsupported(format!(
                "moment oracles are univariate, got dimension {}",
                ds.dim()
            )));
        }
        let m = sample_moments(ds);
        let mean = m.mean()[0];
        let col = ds.column(0);
        let n = col.len() as f64;
        let third = col.iter().map(|&x| (x - mean).powi(3)).sum::<f64>() / n;
        Ok(MomentSet {
            mean,
            variance: m.cov(0, 0),
            third,
        })
    }

    /// `xi_1111 = 3 sigma^4`, the Gaussian-product combination of second
    /// moments (not the fourth central moment).
    pub fn fourth(&self) -> f64 {
        3.0 * self.variance * self.variance
    }
}

/// `gamma_r` (or `eta_r` for empirical moments), `r = 2, 3, 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSet {
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
}

fn derivatives(f: &dyn SmoothFunctional, at: f64) -> Result<[f64; 3]> {
    if f.arity() != 1 {
        return Err(Error::Unsupported(format!(
            "analytic expansions need a univariate functional, {} has arity {}",
            f.name(),
            f.arity()
        )));
    }
    let mut out = [0.0; 3];
    for (i, order) in (2..=4).enumerate() {
        out[i] = f
            .partial(&[at], &vec![0; order])
            .ok_or(Error::DerivativeUnavailable { order })?;
    }
    Ok(out)
}

impl GammaSet {
    pub fn of(f: &dyn SmoothFunctional, m: &MomentSet) -> Result<Self> {
        let [d2, d3, d4] = derivatives(f, m.mean)?;
        Ok(GammaSet {
            g2: m.variance * d2,
            g3: m.third * d3,
            g4: m.fourth() * d4,
        })
    }

    /// `|g2| + |g3| + |g4|`
    pub fn abs_sum(&self) -> f64 {
        self.g2.abs() + self.g3.abs() + self.g4.abs()
    }
}

/// `gamma_2 / (2n) + (gamma_3 / 6 + gamma_4 / 24) / n^2`.
pub fn analytic_bias(f: &dyn SmoothFunctional, m: &MomentSet, n: usize) -> Result<f64> {
    let g = GammaSet::of(f, m)?;
    let n = n as f64;
    Ok(0.5 * g.g2 / n + (g.g3 / 6.0 + g.g4 / 24.0) / (n * n))
}

/// `tau^2 = sigma^2 f'(mu)^2`.
pub fn tau_squared(f: &dyn SmoothFunctional, m: &MomentSet) -> f64 {
    let mut g = [0.0];
    f.gradient(&[m.mean], &mut g);
    m.variance * g[0] * g[0]
}

/// `grad f(mu)' Sigma grad f(mu)` for vector observations.
pub fn tau_squared_cov(f: &dyn SmoothFunctional, mean: &[f64], cov: &[Vec<f64>]) -> f64 {
    let p = mean.len();
    let mut g = vec![0.0; p];
    f.gradient(mean, &mut g);
    let mut t = 0.0;
    for j in 0..p {
        for k in 0..p {
            t += g[j] * g[k] * cov[j][k];
        }
    }
    t
}

/// Plug-in `tau_hat^2` of a dataset (the squared delta-method scale).
pub fn plug_in_tau_squared(f: &dyn SmoothFunctional, ds: &Dataset) -> f64 {
    sigma_hat(f, &sample_moments(ds)).powi(2)
}

/// Ideal bias-corrected value with `B = C = infinity`, from the plug-in
/// contractions `eta_r`:
///
/// ```text
/// single: theta_hat - eta_2 / (2n) - (eta_3 / 6 + eta_4 / 24) / n^2
/// double: theta_hat - (1 + 1/n) eta_2 / (2n) + (eta_3 + eta_4 / 2) / (2n^2)
///                   - (eta_3 / 6 + eta_4 / 24) / n^2
/// ```
pub fn ideal_corrected_expansion(
    ds: &Dataset,
    f: &dyn SmoothFunctional,
    kind: BiasKind,
) -> Result<f64> {
    let m = MomentSet::empirical(ds)?;
    let eta = GammaSet::of(f, &m)?;
    let theta = f.value(&[m.mean]);
    let n = ds.len_of(0) as f64;
    let tail = (eta.g3 / 6.0 + eta.g4 / 24.0) / (n * n);
    Ok(match kind {
        BiasKind::Single => theta - 0.5 * eta.g2 / n - tail,
        BiasKind::Double => {
            theta - 0.5 * (1.0 + 1.0 / n) * eta.g2 / n + 0.5 * (eta.g3 + 0.5 * eta.g4) / (n * n)
                - tail
        }
    })
}

/// Simulation variance of the corrected estimators on one fixed dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceCheck {
    pub reruns: usize,
    pub outer: usize,
    pub n: usize,
    /// Sample variance of `theta_bc` over the re-runs.
    pub var_single: f64,
    /// Plug-in `tau_hat^2`.
    pub tau_sq_hat: f64,
    /// One entry per inner count.
    pub doubles: Vec<DoubleVariance>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleVariance {
    pub inner: usize,
    pub var_double: f64,
    /// `var_double / var_single`; near `4 + 1/C` for large `n B`.
    pub ratio: f64,
}

impl VarianceCheck {
    /// `B n var_single`, comparable to `tau_sq_hat`.
    pub fn scaled_single(&self) -> f64 {
        self.outer as f64 * self.n as f64 * self.var_single
    }
}

/// Re-runs the bias bootstrap `reruns` times on `ds`, re-run `r` using trial
/// index `plan.trial + r`, and returns the variances of `theta_bc` and of
/// `theta_bcc` for each inner count.
pub fn mc_variance_check(
    ds: &Dataset,
    f: &dyn SmoothFunctional,
    plan: &BootstrapPlan,
    reruns: usize,
    inner_counts: &[usize],
) -> Result<VarianceCheck> {
    if reruns < 500 {
        return Err(Error::InvalidPlan(format!(
            "variance check needs at least 500 re-runs, got {reruns}"
        )));
    }
    if inner_counts.is_empty() {
        return Err(Error::InvalidPlan("no inner counts".into()));
    }
    let per_run: Vec<(f64, Vec<f64>)> = (0..reruns as u64)
        .into_par_iter()
        .map(|r| {
            let runs = BiasBootstrap::new(ds, f, plan.with_trial(plan.trial + r))
                .inner_counts(inner_counts)
                .run()?;
            let single = bias_corrected(&runs[0], BiasKind::Single)?;
            let doubles = runs
                .iter()
                .map(|run| bias_corrected(run, BiasKind::Double))
                .collect::<Result<Vec<_>>>()?;
            Ok((single, doubles))
        })
        .collect::<Result<_>>()?;
    let singles: Vec<f64> = per_run.iter().map(|r| r.0).collect();
    let var_single = sample_variance(&singles);
    let doubles = inner_counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let v: Vec<f64> = per_run.iter().map(|r| r.1[i]).collect();
            let var_double = sample_variance(&v);
            DoubleVariance {
                inner: c,
                var_double,
                ratio: var_double / var_single,
            }
        })
        .collect();
    Ok(VarianceCheck {
        reruns,
        outer: plan.outer,
        n: ds.n_eff(),
        var_single,
        tau_sq_hat: plug_in_tau_squared(f, ds),
        doubles,
    })
}
