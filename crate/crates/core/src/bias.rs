//! Single- and double-bootstrap bias correction.
//!
//! With `theta*_b = f(X_bar*_b)` and `theta**_bc = f(X_bar**_bc)`:
//!
//! ```text
//! single:  theta_bc  = 2 theta_hat - B^-1 sum_b theta*_b
//! double:  theta_bcc = 3 theta_hat - 3 B^-1 sum_b theta*_b + (BC)^-1 sum_b sum_c theta**_bc
//! ```
//!
//! The double sum is accumulated per outer resample (sequentially over `c`)
//! and then averaged over `b` with [`tree_sum`](crate::sum::tree_sum), so the
//! result does not depend on the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::theta_hat;
use crate::functional::SmoothFunctional;
use crate::model::{sample_mean, BootstrapPlan, Dataset};
use crate::resample::{draw_outer, inner_moments, resample_mean};
use crate::rng::SeedPath;
use crate::sum::tree_mean;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiasKind {
    Single,
    Double,
}

/// Replicates of one bias-bootstrap run.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasRun {
    pub theta_hat: f64,
    /// `theta*_b`, `b = 1..B`.
    pub outer: Vec<f64>,
    /// `C^-1 sum_c theta**_bc` for each `b`; `None` for single-bootstrap runs.
    pub inner_means: Option<Vec<f64>>,
    /// All `theta**_bc`, row-major by `b`, when retention was requested.
    pub inner_values: Option<Vec<f64>>,
    /// Number of inner resamples per outer resample behind `inner_means`.
    pub inner_count: usize,
}

impl BiasRun {
    pub fn from_parts(
        theta_hat: f64,
        outer: Vec<f64>,
        inner_means: Option<Vec<f64>>,
        inner_count: usize,
    ) -> Self {
        BiasRun {
            theta_hat,
            outer,
            inner_means,
            inner_values: None,
            inner_count,
        }
    }

    pub fn outer_average(&self) -> f64 {
        tree_mean(&self.outer)
    }

    /// `(BC)^-1 sum_b sum_c theta**_bc`.
    pub fn inner_average(&self) -> Option<f64> {
        self.inner_means.as_deref().map(tree_mean)
    }
}

/// Bootstrap estimate of `E(theta_hat) - theta`:
/// `B^-1 sum theta*_b - theta_hat` (single) or
/// `3 B^-1 sum theta*_b - (BC)^-1 sum sum theta**_bc - 2 theta_hat` (double).
pub fn bias_estimate(run: &BiasRun, kind: BiasKind) -> Result<f64> {
    let outer = run.outer_average();
    match kind {
        BiasKind::Single => Ok(outer - run.theta_hat),
        BiasKind::Double => {
            let inner = run
                .inner_average()
                .ok_or_else(|| Error::InvalidPlan("run has no inner resamples".into()))?;
            Ok(3.0 * outer - inner - 2.0 * run.theta_hat)
        }
    }
}

/// `theta_hat` minus the bias estimate of the given kind.
pub fn bias_corrected(run: &BiasRun, kind: BiasKind) -> Result<f64> {
    Ok(run.theta_hat - bias_estimate(run, kind)?)
}

/// `2 theta_hat - B^-1 sum_b theta*_b`.
pub fn bc_single(run: &BiasRun) -> f64 {
    run.theta_hat - (run.outer_average() - run.theta_hat)
}

/// `3 theta_hat - 3 B^-1 sum_b theta*_b + (BC)^-1 sum_b sum_c theta**_bc`.
pub fn bc_double(run: &BiasRun) -> Result<f64> {
    bias_corrected(run, BiasKind::Double)
}

/// Configurable bias-bootstrap runner.
///
/// Inner resample `c` of outer resample `b` always comes from the stream at
/// `SeedPath::inner(trial, b, c)`, whatever `C` is. Running with several inner
/// counts therefore costs one pass at the largest count; the run for a
/// smaller `C` uses the first `C` inner resamples and is bit-identical to a
/// separate run with that `C`.
pub struct BiasBootstrap<'a> {
    ds: &'a Dataset,
    f: &'a dyn SmoothFunctional,
    plan: BootstrapPlan,
    inner_counts: Vec<usize>,
    retain: bool,
}

impl<'a> BiasBootstrap<'a> {
    pub fn new(ds: &'a Dataset, f: &'a dyn SmoothFunctional, plan: BootstrapPlan) -> Self {
        BiasBootstrap {
            ds,
            f,
            plan,
            inner_counts: vec![plan.inner],
            retain: false,
        }
    }

    /// Skip the second level entirely.
    pub fn single_only(mut self) -> Self {
        self.inner_counts.clear();
        self
    }

    /// Produce one run per inner count instead of using `plan.inner`.
    pub fn inner_counts(mut self, counts: &[usize]) -> Self {
        self.inner_counts = counts.to_vec();
        self
    }

    /// Keep every `theta**_bc` (only meaningful with a single inner count).
    pub fn retain_inner(mut self, retain: bool) -> Self {
        self.retain = retain;
        self
    }

    pub fn run(&self) -> Result<Vec<BiasRun>> {
        let ds = self.ds;
        let f = self.f;
        let plan = self.plan;
        if plan.outer == 0 || self.inner_counts.contains(&0) {
            return Err(Error::InvalidPlan("B and C must be at least 1".into()));
        }
        if f.arity() != ds.dim() {
            return Err(Error::ArityMismatch {
                expected: f.arity(),
                got: ds.dim(),
            });
        }
        let theta = theta_hat(f, &sample_mean(ds))?;
        let max_inner = self.inner_counts.iter().copied().max().unwrap_or(0);
        let retain = self.retain && max_inner > 0;
        let counts = &self.inner_counts;

        let per_b: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..plan.outer)
            .into_par_iter()
            .map(|b| {
                let outer = draw_outer(ds, plan.seed, SeedPath::outer(plan.trial, b));
                let t_outer = theta_hat(f, &resample_mean(ds, &outer))?;
                let mut prefix = vec![0.0; counts.len()];
                let mut kept = Vec::with_capacity(if retain { max_inner } else { 0 });
                let mut acc = 0.0;
                for c in 0..max_inner {
                    let mut stream = SeedPath::inner(plan.trial, b, c).stream(plan.seed);
                    let m = inner_moments::<false>(ds, &outer, &mut stream);
                    let t_inner = theta_hat(f, m.mean())?;
                    acc += t_inner;
                    if retain {
                        kept.push(t_inner);
                    }
                    for (slot, &k) in prefix.iter_mut().zip(counts) {
                        if k == c + 1 {
                            *slot = acc / k as f64;
                        }
                    }
                }
                Ok((t_outer, prefix, kept))
            })
            .collect::<Result<_>>()?;

        let outer: Vec<f64> = per_b.iter().map(|r| r.0).collect();
        if counts.is_empty() {
            return Ok(vec![BiasRun::from_parts(theta, outer, None, 0)]);
        }
        let runs = counts
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let inner_means = per_b.iter().map(|r| r.1[i]).collect();
                let mut run = BiasRun::from_parts(theta, outer.clone(), Some(inner_means), k);
                if retain && k == max_inner {
                    run.inner_values =
                        Some(per_b.iter().flat_map(|r| r.2.iter().copied()).collect());
                }
                run
            })
            .collect();
        Ok(runs)
    }
}

/// Nested run with `C = plan.inner`.
pub fn run_bias_bootstrap(
    ds: &Dataset,
    f: &dyn SmoothFunctional,
    plan: &BootstrapPlan,
) -> Result<BiasRun> {
    let mut runs = BiasBootstrap::new(ds, f, *plan).run()?;
    Ok(runs.remove(0))
}

/// Outer level only.
pub fn run_single_bootstrap(
    ds: &Dataset,
    f: &dyn SmoothFunctional,
    plan: &BootstrapPlan,
) -> Result<BiasRun> {
    let mut runs = BiasBootstrap::new(ds, f, *plan).single_only().run()?;
    Ok(runs.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{Cube, Identity};

    fn sample() -> Dataset {
        Dataset::univariate(vec![0.3, 1.9, 2.2, 0.7, 4.1, 3.3, 0.2, 1.1]).unwrap()
    }

    #[test]
    fn single_formula() {
        let run = BiasRun::from_parts(8.0, vec![8.5, 9.5, 9.0], None, 0);
        assert_eq!(bc_single(&run), 7.0);
        assert_eq!(bias_estimate(&run, BiasKind::Single).unwrap(), 1.0);
        assert!(bc_double(&run).is_err());
    }

    #[test]
    fn fixed_point() {
        let run = BiasRun::from_parts(2.5, vec![2.5; 4], Some(vec![2.5; 4]), 3);
        assert_eq!(bc_double(&run).unwrap(), 2.5);
        assert_eq!(bias_estimate(&run, BiasKind::Double).unwrap(), 0.0);
        assert_eq!(bias_estimate(&run, BiasKind::Single).unwrap(), 0.0);
    }

    #[test]
    fn runs_are_deterministic() {
        let plan = BootstrapPlan::new(1, 1, 77).unwrap();
        let a = run_bias_bootstrap(&sample(), &Cube, &plan).unwrap();
        let b = run_bias_bootstrap(&sample(), &Cube, &plan).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn prefix_runs_match_separate_runs() {
        let ds = sample();
        let plan = BootstrapPlan::new(40, 7, 5).unwrap().with_trial(3);
        let runs = BiasBootstrap::new(&ds, &Cube, plan)
            .inner_counts(&[1, 2, 7])
            .run()
            .unwrap();
        for run in &runs {
            let alone = run_bias_bootstrap(&ds, &Cube, &plan.with_inner(run.inner_count)).unwrap();
            assert_eq!(*run, alone);
        }
        let single = run_single_bootstrap(&ds, &Cube, &plan).unwrap();
        assert_eq!(single.outer, runs[0].outer);
    }

    #[test]
    fn retained_values_average_to_inner_means() {
        let ds = sample();
        let plan = BootstrapPlan::new(10, 4, 1).unwrap();
        let run = BiasBootstrap::new(&ds, &Identity, plan)
            .retain_inner(true)
            .run()
            .unwrap()
            .remove(0);
        let values = run.inner_values.as_ref().unwrap();
        assert_eq!(values.len(), 40);
        for (b, m) in run.inner_means.as_ref().unwrap().iter().enumerate() {
            let avg = values[b * 4..b * 4 + 4].iter().sum::<f64>() / 4.0;
            assert!((avg - m).abs() < 1e-12);
        }
    }

    #[test]
    fn arity_is_checked() {
        let ds = Dataset::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let plan = BootstrapPlan::new(2, 1, 0).unwrap();
        assert!(matches!(
            run_bias_bootstrap(&ds, &Cube, &plan),
            Err(Error::ArityMismatch { .. })
        ));
    }
}
