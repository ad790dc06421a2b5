//! Plug-in estimates `theta_hat = f(X_bar)` and the delta-method scale
//! `sigma_hat`.

use crate::error::{Error, Result};
use crate::functional::SmoothFunctional;
use crate::model::{Dataset, DependenceModel, MAX_DIM};
use crate::resample::{resample_moments, Resample};

/// First and second sample moments of a sample or resample. Covariances use
/// divisor `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub(crate) dim: usize,
    pub(crate) model: DependenceModel,
    pub(crate) counts: [usize; MAX_DIM],
    pub(crate) mean: [f64; MAX_DIM],
    pub(crate) cov: [[f64; MAX_DIM]; MAX_DIM],
    pub(crate) has_spread: bool,
}

impl SampleMoments {
    pub fn mean(&self) -> &[f64] {
        &self.mean[..self.dim]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sample covariance of components `j` and `k` (divisor `n`). Under
    /// componentwise independence only the diagonal is estimated; off-diagonal
    /// entries are zero.
    pub fn cov(&self, j: usize, k: usize) -> f64 {
        debug_assert!(
            self.has_spread,
            "moments were accumulated without second moments"
        );
        self.cov[j][k]
    }

    pub fn count(&self, j: usize) -> usize {
        self.counts[j]
    }

    pub fn n_eff(&self) -> usize {
        self.counts[..self.dim].iter().copied().min().unwrap_or(0)
    }
}

/// Moments of the full observed sample.
pub fn sample_moments(ds: &Dataset) -> SampleMoments {
    resample_moments(ds, &Resample::identity(ds))
}

/// `theta_hat = f(mean)`.
pub fn theta_hat(f: &dyn SmoothFunctional, mean: &[f64]) -> Result<f64> {
    if f.arity() != mean.len() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            got: mean.len(),
        });
    }
    let v = f.value(mean);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteValue {
            what: "f(mean)",
            value: v,
        })
    }
}

/// Delta-method scale: `sigma_hat^2 = sum_{j,k} f_j(X_bar) f_k(X_bar) xi_hat_jk`
/// with `xi_hat` the sample covariance (divisor `n`).
///
/// Under componentwise independence the columns have their own lengths, and
/// the sum becomes `sum_j f_j^2 xi_hat_jj n_eff / n_j`, so that
/// `sigma_hat^2 / n_eff` still estimates the variance of `theta_hat`.
pub fn sigma_hat(f: &dyn SmoothFunctional, m: &SampleMoments) -> f64 {
    let p = m.dim;
    let mut grad = [0.0; MAX_DIM];
    f.gradient(m.mean(), &mut grad[..p]);
    let mut var = 0.0;
    match m.model {
        DependenceModel::VectorIid => {
            for j in 0..p {
                for k in 0..p {
                    var += grad[j] * grad[k] * m.cov(j, k);
                }
            }
        }
        DependenceModel::ComponentwiseIndependent => {
            let n_eff = m.n_eff() as f64;
            for j in 0..p {
                var += grad[j] * grad[j] * m.cov(j, j) * n_eff / m.counts[j] as f64;
            }
        }
    }
    var.max(0.0).sqrt()
}

/// `theta_hat`, `sigma_hat` and the `n` used for root-n scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEstimate {
    pub theta: f64,
    pub sigma: f64,
    pub n_eff: usize,
}

impl PointEstimate {
    pub fn from_moments(f: &dyn SmoothFunctional, m: &SampleMoments) -> Result<Self> {
        Ok(PointEstimate {
            theta: theta_hat(f, m.mean())?,
            sigma: sigma_hat(f, m),
            n_eff: m.n_eff(),
        })
    }

    pub fn of(f: &dyn SmoothFunctional, ds: &Dataset) -> Result<Self> {
        Self::from_moments(f, &sample_moments(ds))
    }
}
