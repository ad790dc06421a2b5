//! Monte Carlo experiment runners.
//!
//! Every grid row `(n, B)` gets its own master seed
//! `derive_seed(seed, [n, B])`; trial `t` draws its data from
//! `SeedPath::data(t)` and its resamples from the outer/inner paths of trial
//! `t`. Rows that differ only in the functional or in `C` therefore see the
//! same datasets and the same resamples.

use rayon::prelude::*;

use crate::bias::{bias_estimate, BiasBootstrap, BiasKind};
use crate::error::{Error, Result};
use crate::functional::SmoothFunctional;
use crate::harness::config::{CSpec, ExperimentConfig, ExperimentKind, Method, Reference};
use crate::harness::generator::DataGenerator;
use crate::harness::report::{BiasRow, CoverageRow, OracleRow, VarianceRow};
use crate::interval::{
    calibrate_conventional, calibrate_warp_speed, draw_nested, single_interval, Interval,
    RootSample, Side,
};
use crate::model::{BootstrapPlan, RootKind};
use crate::oracle::{analytic_bias, mc_variance_check, tau_squared, GammaSet};
use crate::rng::{derive_seed, SeedPath};
use crate::sum::{sample_variance, tree_mean};

/// Master seed of grid row `(n, B)`.
pub fn row_seed(seed: u64, n: usize, outer: usize) -> u64 {
    derive_seed(seed, &[n as u64, outer as u64])
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    cfg.validate()?;
    if cfg.experiment != kind {
        return Err(Error::Config(format!(
            "config describes a {:?} experiment, not {:?}",
            cfg.experiment, kind
        )));
    }
    Ok(())
}

/// Runs `trials` independent trials in parallel, in trial order. Fails if
/// more than 1% of them fail; otherwise returns the successes and the number
/// of failures.
fn run_trials<T: Send>(
    trials: usize,
    f: impl Fn(u64) -> Result<T> + Sync,
) -> Result<(Vec<T>, usize)> {
    let results: Vec<Result<T>> = (0..trials as u64).into_par_iter().map(&f).collect();
    let mut ok = Vec::with_capacity(trials);
    let mut failed = 0;
    let mut first = None;
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => {
                failed += 1;
                first.get_or_insert_with(|| e.to_string());
            }
        }
    }
    if failed * 100 > trials {
        return Err(Error::ExcessTrialFailures {
            failed,
            total: trials,
            first: first.unwrap_or_default(),
        });
    }
    Ok((ok, failed))
}

fn standard_error(values: &[f64]) -> Option<f64> {
    (values.len() >= 2).then(|| (sample_variance(values) / values.len() as f64).sqrt())
}

struct BiasTrial {
    single: f64,
    doubles: Vec<f64>,
    /// `theta_hat - theta`
    error: f64,
}

/// Bias table rows for one (functional, n, B).
#[allow(clippy::too_many_arguments)]
pub fn bias_rows(
    gen: &DataGenerator,
    f: &dyn SmoothFunctional,
    n: usize,
    outer: usize,
    inner: &[CSpec],
    c_cap: Option<usize>,
    trials: usize,
    reference: Reference,
    seed: u64,
) -> Result<Vec<BiasRow>> {
    let master = row_seed(seed, n, outer);
    let counts: Vec<usize> = inner.iter().map(|c| c.resolve(outer, c_cap)).collect();
    let theta = f.value(&[gen.moments().mean]);
    let plan = BootstrapPlan::new(outer, counts.iter().copied().max().unwrap_or(1), master)?;
    let (done, failed) = run_trials(trials, |t| {
        let ds = gen.generate(n, master, SeedPath::data(t))?;
        let boot = BiasBootstrap::new(&ds, f, plan.with_trial(t));
        let runs = if counts.is_empty() {
            boot.single_only().run()?
        } else {
            boot.inner_counts(&counts).run()?
        };
        let doubles = if counts.is_empty() {
            Vec::new()
        } else {
            runs.iter()
                .map(|r| bias_estimate(r, BiasKind::Double))
                .collect::<Result<_>>()?
        };
        Ok(BiasTrial {
            single: bias_estimate(&runs[0], BiasKind::Single)?,
            doubles,
            error: runs[0].theta_hat - theta,
        })
    })?;
    let reference_bias = match reference {
        Reference::Analytic => analytic_bias(f, &gen.moments(), n)?,
        Reference::MonteCarlo => tree_mean(&done.iter().map(|t| t.error).collect::<Vec<_>>()),
    };
    let row = |c_label: String, c: usize, values: Vec<f64>| {
        let mean = tree_mean(&values);
        BiasRow {
            generator: gen.label(),
            functional: f.name(),
            n,
            b: outer,
            c_label,
            c,
            mean_bias_estimate: mean,
            reference_bias,
            ratio: mean / reference_bias,
            mc_se: standard_error(&values),
            trials: done.len(),
            failed,
        }
    };
    let mut rows = vec![row(
        "single".into(),
        0,
        done.iter().map(|t| t.single).collect(),
    )];
    for (i, spec) in inner.iter().enumerate() {
        rows.push(row(
            spec.label(),
            counts[i],
            done.iter().map(|t| t.doubles[i]).collect(),
        ));
    }
    Ok(rows)
}

/// Bias table over the whole grid of `cfg`.
pub fn run_bias_experiment(cfg: &ExperimentConfig) -> Result<Vec<BiasRow>> {
    expect_kind(cfg, ExperimentKind::Bias)?;
    let gen = cfg.generator.generator();
    let mut rows = Vec::new();
    for fk in &cfg.functionals {
        let f = fk.functional();
        for &n in &cfg.n {
            for outer in cfg.b.values(n) {
                rows.extend(bias_rows(
                    &gen,
                    f.as_ref(),
                    n,
                    outer,
                    &cfg.c,
                    cfg.c_cap,
                    cfg.trials,
                    cfg.reference,
                    cfg.seed,
                )?);
            }
        }
    }
    Ok(rows)
}

/// One coverage cell: method and inner count under a root kind, side and
/// level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageCell {
    pub root_kind: RootKind,
    pub side: Side,
    pub alpha: f64,
    pub method: Method,
    pub c: usize,
}

/// Outcome of one cell in one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOutcome {
    pub interval: Interval,
    pub covered: bool,
    pub level: f64,
    pub out_of_range: bool,
}

/// Evaluates every cell on one dataset's nested draws. `draws` must have at
/// least as many inner resamples per outer resample as any cell needs.
pub fn evaluate_cells(
    draws: &crate::interval::NestedDraws,
    cells: &[CoverageCell],
    theta: f64,
) -> Result<Vec<CellOutcome>> {
    let mut out = Vec::with_capacity(cells.len());
    let mut cache: Vec<((RootKind, usize), RootSample)> = Vec::new();
    for cell in cells {
        let c = match cell.method {
            Method::Single | Method::WarpSpeed => 1,
            Method::ConventionalDouble => cell.c,
        };
        let key = (cell.root_kind, c);
        let roots = match cache.iter().position(|(k, _)| *k == key) {
            Some(i) => &cache[i].1,
            None => {
                let view = if c == draws.inner_per_outer {
                    draws.clone()
                } else {
                    draws.prefix(c)
                };
                cache.push((key, RootSample::from_draws(&view, cell.root_kind)));
                &cache.last().expect("just pushed").1
            }
        };
        let (interval, level, out_of_range) = match cell.method {
            Method::Single => (
                single_interval(
                    &roots.estimate,
                    &roots.outer_cdf(),
                    cell.root_kind,
                    cell.side,
                    cell.alpha,
                )?,
                cell.alpha,
                false,
            ),
            Method::WarpSpeed => {
                let cal = calibrate_warp_speed(roots, cell.alpha, cell.side)?;
                (cal.interval, cal.level, cal.out_of_range)
            }
            Method::ConventionalDouble => {
                let cal = calibrate_conventional(roots, cell.alpha, cell.side)?;
                (cal.interval, cal.level, cal.out_of_range)
            }
        };
        out.push(CellOutcome {
            interval,
            covered: interval.contains(theta),
            level,
            out_of_range,
        });
    }
    Ok(out)
}

/// Coverage rows for one (functional, n, B).
pub fn coverage_rows(
    gen: &DataGenerator,
    f: &dyn SmoothFunctional,
    n: usize,
    outer: usize,
    cells: &[CoverageCell],
    trials: usize,
    seed: u64,
) -> Result<Vec<CoverageRow>> {
    let master = row_seed(seed, n, outer);
    let theta = f.value(&[gen.moments().mean]);
    let max_c = cells
        .iter()
        .map(|c| {
            if c.method == Method::ConventionalDouble {
                c.c
            } else {
                1
            }
        })
        .max()
        .unwrap_or(1);
    let plan = BootstrapPlan::new(outer, max_c, master)?;
    let (done, failed) = run_trials(trials, |t| {
        let ds = gen.generate(n, master, SeedPath::data(t))?;
        let draws = draw_nested(&ds, f, &plan.with_trial(t))?;
        evaluate_cells(&draws, cells, theta)
    })?;
    let k = done.len();
    Ok(cells
        .iter()
        .enumerate()
        .map(|(i, cell)| {
            let covered = done.iter().filter(|o| o[i].covered).count();
            let p = covered as f64 / k as f64;
            CoverageRow {
                generator: gen.label(),
                functional: f.name(),
                root_kind: cell.root_kind.label().into(),
                side: cell.side.label().into(),
                n,
                b: outer,
                c: if cell.method == Method::Single {
                    0
                } else {
                    cell.c
                },
                method: cell.method.label().into(),
                alpha: cell.alpha,
                coverage: p,
                mc_se: (k >= 2).then(|| (p * (1.0 - p) / k as f64).sqrt()),
                mean_level: tree_mean(&done.iter().map(|o| o[i].level).collect::<Vec<_>>()),
                out_of_range: done.iter().filter(|o| o[i].out_of_range).count(),
                trials: k,
                failed,
            }
        })
        .collect())
}

/// The cells of `cfg` at outer count `outer`, in report order.
pub fn coverage_cells(cfg: &ExperimentConfig, outer: usize) -> Vec<CoverageCell> {
    let mut cells = Vec::new();
    for &root_kind in &cfg.root_kinds {
        for &side in &cfg.sides {
            for &alpha in &cfg.alpha {
                for &method in &cfg.methods {
                    let cs: Vec<usize> = match method {
                        Method::Single | Method::WarpSpeed => vec![1],
                        Method::ConventionalDouble => {
                            cfg.c.iter().map(|c| c.resolve(outer, cfg.c_cap)).collect()
                        }
                    };
                    for c in cs {
                        cells.push(CoverageCell {
                            root_kind,
                            side,
                            alpha,
                            method,
                            c,
                        });
                    }
                }
            }
        }
    }
    cells
}

pub fn run_coverage_experiment(cfg: &ExperimentConfig) -> Result<Vec<CoverageRow>> {
    expect_kind(cfg, ExperimentKind::Coverage)?;
    if cfg.methods.contains(&Method::ConventionalDouble) && cfg.c.is_empty() {
        return Err(Error::Config(
            "conventional-double needs at least one inner count in c".into(),
        ));
    }
    let gen = cfg.generator.generator();
    let mut rows = Vec::new();
    for fk in &cfg.functionals {
        let f = fk.functional();
        for &n in &cfg.n {
            for outer in cfg.b.values(n) {
                let cells = coverage_cells(cfg, outer);
                rows.extend(coverage_rows(
                    &gen,
                    f.as_ref(),
                    n,
                    outer,
                    &cells,
                    cfg.trials,
                    cfg.seed,
                )?);
            }
        }
    }
    Ok(rows)
}

/// Variance rows: one fixed dataset per `n` (trial 0 of the row seed),
/// re-bootstrapped `cfg.reruns` times.
pub fn run_variance_check(cfg: &ExperimentConfig) -> Result<Vec<VarianceRow>> {
    expect_kind(cfg, ExperimentKind::VarianceCheck)?;
    let gen = cfg.generator.generator();
    let mut rows = Vec::new();
    for fk in &cfg.functionals {
        let f = fk.functional();
        for &n in &cfg.n {
            for outer in cfg.b.values(n) {
                let master = row_seed(cfg.seed, n, outer);
                let ds = gen.generate(n, master, SeedPath::data(0))?;
                let counts: Vec<usize> =
                    cfg.c.iter().map(|c| c.resolve(outer, cfg.c_cap)).collect();
                let plan = BootstrapPlan::new(outer, 1, master)?;
                let check = mc_variance_check(&ds, f.as_ref(), &plan, cfg.reruns, &counts)?;
                for d in &check.doubles {
                    rows.push(VarianceRow {
                        generator: gen.label(),
                        functional: f.name(),
                        n,
                        b: outer,
                        c: d.inner,
                        reruns: check.reruns,
                        var_single: check.var_single,
                        var_double: d.var_double,
                        ratio: d.ratio,
                        target_ratio: 4.0 + 1.0 / d.inner as f64,
                        scaled_single: check.scaled_single(),
                        tau_sq_hat: check.tau_sq_hat,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Analytic bias and `tau^2` for every (functional, n) of `cfg`.
pub fn oracle_table(cfg: &ExperimentConfig) -> Result<Vec<OracleRow>> {
    cfg.validate()?;
    let gen = cfg.generator.generator();
    let m = gen.moments();
    let mut rows = Vec::new();
    for fk in &cfg.functionals {
        let f = fk.functional();
        let g = GammaSet::of(f.as_ref(), &m)?;
        for &n in &cfg.n {
            rows.push(OracleRow {
                generator: gen.label(),
                functional: f.name(),
                n,
                analytic_bias: analytic_bias(f.as_ref(), &m, n)?,
                leading_term: 0.5 * g.g2 / n as f64,
                tau_squared: tau_squared(f.as_ref(), &m),
            });
        }
    }
    Ok(rows)
}
