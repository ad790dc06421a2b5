//! Bootstrap roots, single-bootstrap intervals, and coverage-calibrated
//! intervals (warp-speed and conventional double bootstrap).
//!
//! Roots of outer resample `b` and of its inner resamples:
//!
//! ```text
//! percentile:    R*_b  = n^{1/2} (theta*_b  - theta_hat)
//!                R**_b = n^{1/2} (theta**_b - theta*_b)
//! percentile-t:  the same divided by sigma*_b and sigma**_b respectively
//! ```
//!
//! Upper one-sided intervals at level `beta` are `(theta_hat - s x_beta, inf)`
//! with `s = sigma_hat / n^{1/2}` (percentile-t) or `n^{-1/2}` (percentile) and
//! `x_beta` a quantile of the outer roots. Two-sided intervals are equal-tailed,
//! `(theta_hat - s x_{(1+beta)/2}, theta_hat - s x_{(1-beta)/2})`. All intervals
//! are open.
//!
//! Calibration estimates the coverage of the level-`beta` interval by how
//! often `theta_hat` lands in the bootstrap intervals built around each
//! `theta*_b` with a second-level quantile, then picks the smallest `beta`
//! whose estimated coverage reaches the target. Because
//! `theta_hat` is in `(theta*_b - s*_b x, inf)` exactly when `R*_b < x`, the
//! estimated coverage only depends on the ranks of the outer roots among the
//! inner roots, and the search over `beta` is exact.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ecdf::{order_index, EmpiricalCdf};
use crate::error::{Error, Result};
use crate::estimate::sample_moments;
use crate::estimate::{sigma_hat, theta_hat, PointEstimate, SampleMoments};
use crate::functional::SmoothFunctional;
use crate::model::{BootstrapPlan, Dataset, RootKind};
use crate::resample::{draw_outer, inner_moments, resample_moments};
use crate::rng::SeedPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// `(L, inf)`
    Upper,
    /// Equal-tailed `(L, U)`.
    TwoSided,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Upper => "upper",
            Side::TwoSided => "two-sided",
        }
    }
}

/// Open interval `(lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }
}

/// `theta` and `sigma` of one resample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replicate {
    pub theta: f64,
    pub sigma: f64,
}

/// Estimates from the observed sample, every outer resample and every inner
/// resample of a nested run. Roots of either kind are derived from these.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedDraws {
    pub estimate: PointEstimate,
    pub outer: Vec<Replicate>,
    /// Row-major by outer resample, `inner_per_outer` entries each.
    pub inner: Vec<Replicate>,
    pub inner_per_outer: usize,
}

impl NestedDraws {
    /// The draws a run with `C = k` would have produced. Inner resample `c` of
    /// outer resample `b` comes from the same stream whatever `C` is, so this
    /// is bit-identical to a separate run.
    pub fn prefix(&self, k: usize) -> NestedDraws {
        let c = self.inner_per_outer;
        assert!(k >= 1 && k <= c, "prefix of {k} inner resamples out of {c}");
        NestedDraws {
            estimate: self.estimate,
            outer: self.outer.clone(),
            inner: self
                .inner
                .chunks(c)
                .flat_map(|row| row[..k].iter().copied())
                .collect(),
            inner_per_outer: k,
        }
    }

    /// [`prefix`](Self::prefix) with `k = 1`: the warp-speed draws.
    pub fn first_inner(&self) -> NestedDraws {
        self.prefix(1)
    }
}

fn replicate(f: &dyn SmoothFunctional, m: &SampleMoments) -> Result<Replicate> {
    let theta = theta_hat(f, m.mean())?;
    let sigma = sigma_hat(f, m);
    if !sigma.is_finite() {
        return Err(Error::NonFiniteValue {
            what: "sigma of a resample",
            value: sigma,
        });
    }
    Ok(Replicate { theta, sigma })
}

/// Draws `B` outer and `B * C` inner resamples and evaluates `theta` and
/// `sigma` on each. Streams follow the same [`SeedPath`] contract as the bias
/// bootstrap.
pub fn draw_nested(
    ds: &Dataset,
    f: &dyn SmoothFunctional,
    plan: &BootstrapPlan,
) -> Result<NestedDraws> {
    if f.arity() != ds.dim() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            got: ds.dim(),
        });
    }
    let estimate = PointEstimate::of(f, ds)?;
    let c_count = plan.inner;
    let per_b: Vec<(Replicate, Vec<Replicate>)> = (0..plan.outer)
        .into_par_iter()
        .map(|b| {
            let outer = draw_outer(ds, plan.seed, SeedPath::outer(plan.trial, b));
            let rep = replicate(f, &resample_moments(ds, &outer))?;
            let mut inner = Vec::with_capacity(c_count);
            for c in 0..c_count {
                let mut stream = SeedPath::inner(plan.trial, b, c).stream(plan.seed);
                inner.push(replicate(
                    f,
                    &inner_moments::<true>(ds, &outer, &mut stream),
                )?);
            }
            Ok((rep, inner))
        })
        .collect::<Result<_>>()?;
    let mut outer = Vec::with_capacity(plan.outer);
    let mut inner = Vec::with_capacity(plan.outer * c_count);
    for (o, i) in per_b {
        outer.push(o);
        inner.extend(i);
    }
    Ok(NestedDraws {
        estimate,
        outer,
        inner,
        inner_per_outer: c_count,
    })
}

/// Outer and inner roots of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSample {
    pub estimate: PointEstimate,
    pub root_kind: RootKind,
    pub outer_roots: Vec<f64>,
    /// Row-major by outer resample.
    pub inner_roots: Vec<f64>,
    pub inner_per_outer: usize,
    /// Roots whose scale estimate was zero (set to 0 or +-inf).
    pub degenerate_count: usize,
}

/// `n^{1/2} (theta - centre) / sigma` with the zero-scale rule: 0 if the
/// numerator is 0 too, otherwise an infinity of the numerator's sign.
fn studentized(sqrt_n: f64, theta: f64, centre: f64, sigma: f64, degenerate: &mut usize) -> f64 {
    let num = sqrt_n * (theta - centre);
    if sigma > 0.0 {
        return num / sigma;
    }
    *degenerate += 1;
    if num == 0.0 {
        0.0
    } else {
        num.signum() * f64::INFINITY
    }
}

impl RootSample {
    pub fn from_draws(draws: &NestedDraws, root_kind: RootKind) -> RootSample {
        let sqrt_n = (draws.estimate.n_eff as f64).sqrt();
        let c = draws.inner_per_outer;
        let mut degenerate = 0;
        let (outer_roots, inner_roots) = match root_kind {
            RootKind::Percentile => (
                draws
                    .outer
                    .iter()
                    .map(|o| sqrt_n * (o.theta - draws.estimate.theta))
                    .collect(),
                draws
                    .inner
                    .iter()
                    .enumerate()
                    .map(|(i, r)| sqrt_n * (r.theta - draws.outer[i / c].theta))
                    .collect(),
            ),
            RootKind::PercentileT => {
                let outer: Vec<f64> = draws
                    .outer
                    .iter()
                    .map(|o| {
                        studentized(
                            sqrt_n,
                            o.theta,
                            draws.estimate.theta,
                            o.sigma,
                            &mut degenerate,
                        )
                    })
                    .collect();
                let inner: Vec<f64> = draws
                    .inner
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        studentized(
                            sqrt_n,
                            r.theta,
                            draws.outer[i / c].theta,
                            r.sigma,
                            &mut degenerate,
                        )
                    })
                    .collect();
                (outer, inner)
            }
        };
        RootSample {
            estimate: draws.estimate,
            root_kind,
            outer_roots,
            inner_roots,
            inner_per_outer: c,
            degenerate_count: degenerate,
        }
    }

    pub fn outer_count(&self) -> usize {
        self.outer_roots.len()
    }

    /// Inner roots of outer resample `b`.
    pub fn inner_of(&self, b: usize) -> &[f64] {
        let c = self.inner_per_outer;
        &self.inner_roots[b * c..(b + 1) * c]
    }

    /// `F*_B`, the single-bootstrap CDF of the outer roots.
    pub fn outer_cdf(&self) -> EmpiricalCdf {
        EmpiricalCdf::from_slice(&self.outer_roots)
    }

    /// CDF of all inner roots pooled (`F~*_B` when `C = 1`).
    pub fn inner_cdf(&self) -> EmpiricalCdf {
        EmpiricalCdf::from_slice(&self.inner_roots)
    }
}

/// Draws and returns the roots of kind `plan.root_kind`.
pub fn compute_roots(
    ds: &Dataset,
    f: &dyn SmoothFunctional,
    plan: &BootstrapPlan,
) -> Result<RootSample> {
    Ok(RootSample::from_draws(
        &draw_nested(ds, f, plan)?,
        plan.root_kind,
    ))
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLevel(level))
    }
}

/// Interval from explicit root quantiles: `hi` sets the lower endpoint, `lo`
/// (two-sided only) the upper one.
pub fn interval_from_quantiles(
    pe: &PointEstimate,
    kind: RootKind,
    lo: Option<f64>,
    hi: f64,
) -> Interval {
    let sqrt_n = (pe.n_eff as f64).sqrt();
    let scale = match kind {
        RootKind::Percentile => 1.0 / sqrt_n,
        RootKind::PercentileT => pe.sigma / sqrt_n,
    };
    // zero scale pins the endpoint at theta_hat even for infinite quantiles
    let endpoint = |x: f64| {
        if scale == 0.0 {
            pe.theta
        } else {
            pe.theta - scale * x
        }
    };
    Interval {
        lower: endpoint(hi),
        upper: lo.map_or(f64::INFINITY, endpoint),
    }
}

/// The level-`level` interval from the single-bootstrap quantiles of `cdf`.
pub fn single_interval(
    pe: &PointEstimate,
    cdf: &EmpiricalCdf,
    kind: RootKind,
    side: Side,
    level: f64,
) -> Result<Interval> {
    check_level(level)?;
    Ok(match side {
        Side::Upper => interval_from_quantiles(pe, kind, None, cdf.quantile(level)?),
        Side::TwoSided => interval_from_quantiles(
            pe,
            kind,
            Some(cdf.quantile((1.0 - level) / 2.0)?),
            cdf.quantile((1.0 + level) / 2.0)?,
        ),
    })
}

/// Result of a coverage calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub interval: Interval,
    /// Calibrated nominal level `beta_hat`.
    pub level: f64,
    /// Estimated coverage at `beta_hat`.
    pub estimated_coverage: f64,
    /// No candidate level reached the target; `level` is `1 - 1/(2B)`.
    pub out_of_range: bool,
}

/// Ranks of each outer root within the reference inner roots it is compared
/// with: `#{inner < R*_b}` and `#{inner <= R*_b}`.
struct Ranks {
    below: Vec<u32>,
    at_most: Vec<u32>,
    /// Number of reference inner roots, the `N` in the quantile index
    /// `ceil(level N)`.
    reference_len: usize,
}

impl Ranks {
    /// Warp-speed: every outer root against the pooled inner roots.
    fn pooled(roots: &RootSample) -> Ranks {
        let inner = roots.inner_cdf();
        Ranks {
            below: roots
                .outer_roots
                .iter()
                .map(|&r| inner.count_below(r) as u32)
                .collect(),
            at_most: roots
                .outer_roots
                .iter()
                .map(|&r| inner.count_at_most(r) as u32)
                .collect(),
            reference_len: inner.len(),
        }
    }

    /// Conventional: outer root `b` against the inner roots of resample `b`.
    fn per_outer(roots: &RootSample) -> Ranks {
        let mut below = Vec::with_capacity(roots.outer_count());
        let mut at_most = Vec::with_capacity(roots.outer_count());
        for (b, &r) in roots.outer_roots.iter().enumerate() {
            let inner = roots.inner_of(b);
            below.push(inner.iter().filter(|&&x| x < r).count() as u32);
            at_most.push(inner.iter().filter(|&&x| x <= r).count() as u32);
        }
        Ranks {
            below,
            at_most,
            reference_len: roots.inner_per_outer,
        }
    }

    /// Quantile indices `(j_lo, j_hi)` of the level-`beta` interval; `j_lo` is
    /// 0 for upper intervals.
    fn indices(&self, side: Side, beta: f64) -> (usize, usize) {
        let n = self.reference_len;
        match side {
            Side::Upper => (0, order_index(beta, n)),
            Side::TwoSided => (
                order_index((1.0 - beta) / 2.0, n),
                order_index((1.0 + beta) / 2.0, n),
            ),
        }
    }

    /// Number of `b` whose bootstrap interval covers `theta_hat`:
    /// `R*_b < x_(j_hi)` is `#{inner <= R*_b} < j_hi`, and
    /// `x_(j_lo) < R*_b` is `#{inner < R*_b} >= j_lo`.
    fn covered(&self, side: Side, beta: f64) -> usize {
        let (j_lo, j_hi) = self.indices(side, beta);
        match side {
            Side::Upper => self
                .at_most
                .iter()
                .filter(|&&m| (m as usize) < j_hi)
                .count(),
            Side::TwoSided => self
                .below
                .iter()
                .zip(&self.at_most)
                .filter(|(&l, &m)| (l as usize) >= j_lo && (m as usize) < j_hi)
                .count(),
        }
    }
}

/// Exact search for the smallest candidate level `j / N`, `j = 1..N-1`, whose
/// estimated coverage reaches `target`. `N` is the number of reference inner
/// roots, and the candidates contain every jump of the coverage step function
/// inside `(0, 1)`.
fn calibrate(roots: &RootSample, ranks: &Ranks, target: f64, side: Side) -> Result<Calibration> {
    check_level(target)?;
    let b_count = roots.outer_count();
    let need = order_index(target, b_count);
    let n = ranks.reference_len;
    // levels must stay inside (0, 1); the top candidate `N / N` is what the
    // out-of-range fallback `1 - 1/(2B)` selects anyway
    let last = n.saturating_sub(1);
    let mut found = None;
    let mut previous = 0;
    for j in 1..=last {
        let beta = j as f64 / n as f64;
        let covered = ranks.covered(side, beta);
        assert!(
            covered >= previous,
            "estimated coverage decreased from {previous} to {covered} at level {beta}"
        );
        previous = covered;
        if covered >= need {
            found = Some((beta, covered));
            break;
        }
    }
    let (level, covered, out_of_range) = match found {
        Some((beta, covered)) => (beta, covered, false),
        None => {
            let beta = 1.0 - 1.0 / (2.0 * b_count as f64);
            (beta, ranks.covered(side, beta), true)
        }
    };
    let interval = single_interval(
        &roots.estimate,
        &roots.outer_cdf(),
        roots.root_kind,
        side,
        level,
    )?;
    Ok(Calibration {
        interval,
        level,
        estimated_coverage: covered as f64 / b_count as f64,
        out_of_range,
    })
}

/// Estimated coverage `p_hat(beta)` of the level-`beta` warp-speed bootstrap
/// intervals (pooled inner quantiles).
pub fn warp_speed_coverage(roots: &RootSample, side: Side, beta: f64) -> f64 {
    Ranks::pooled(roots).covered(side, beta) as f64 / roots.outer_count() as f64
}

/// Estimated coverage with per-outer-resample inner quantiles.
pub fn conventional_coverage(roots: &RootSample, side: Side, beta: f64) -> f64 {
    Ranks::per_outer(roots).covered(side, beta) as f64 / roots.outer_count() as f64
}

/// Warp-speed calibration of a `C = 1` root sample.
pub fn calibrate_warp_speed(roots: &RootSample, level: f64, side: Side) -> Result<Calibration> {
    if roots.inner_per_outer != 1 {
        return Err(Error::InvalidPlan(format!(
            "warp-speed calibration needs C = 1, got C = {}",
            roots.inner_per_outer
        )));
    }
    calibrate(roots, &Ranks::pooled(roots), level, side)
}

/// Conventional double-bootstrap calibration: resample `b` is judged with the
/// quantiles of its own `C` inner roots. With `C = 1` every candidate level
/// gives the same estimate; use [`calibrate_warp_speed`] instead.
pub fn calibrate_conventional(roots: &RootSample, level: f64, side: Side) -> Result<Calibration> {
    calibrate(roots, &Ranks::per_outer(roots), level, side)
}

pub fn warp_speed_calibrated_interval(
    ds: &Dataset,
    f: &dyn SmoothFunctional,
    plan: &BootstrapPlan,
    level: f64,
    side: Side,
) -> Result<Calibration> {
    if plan.inner != 1 {
        return Err(Error::InvalidPlan(format!(
            "warp-speed bootstrap uses C = 1, got C = {}",
            plan.inner
        )));
    }
    calibrate_warp_speed(&compute_roots(ds, f, plan)?, level, side)
}

pub fn conventional_calibrated_interval(
    ds: &Dataset,
    f: &dyn SmoothFunctional,
    plan: &BootstrapPlan,
    level: f64,
    side: Side,
) -> Result<Calibration> {
    calibrate_conventional(&compute_roots(ds, f, plan)?, level, side)
}

/// Single-bootstrap interval straight from data.
pub fn single_bootstrap_interval(
    ds: &Dataset,
    f: &dyn SmoothFunctional,
    plan: &BootstrapPlan,
    level: f64,
    side: Side,
) -> Result<Interval> {
    let roots = compute_roots(ds, f, &plan.with_inner(1))?;
    single_interval(
        &roots.estimate,
        &roots.outer_cdf(),
        plan.root_kind,
        side,
        level,
    )
}

/// Point estimate of the observed sample.
pub fn point_estimate(ds: &Dataset, f: &dyn SmoothFunctional) -> Result<PointEstimate> {
    PointEstimate::from_moments(f, &sample_moments(ds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::Identity;

    fn pe() -> PointEstimate {
        PointEstimate {
            theta: 10.0,
            sigma: 2.0,
            n_eff: 16,
        }
    }

    fn manual_roots(outer: Vec<f64>, inner: Vec<f64>, c: usize) -> RootSample {
        RootSample {
            estimate: pe(),
            root_kind: RootKind::PercentileT,
            outer_roots: outer,
            inner_roots: inner,
            inner_per_outer: c,
            degenerate_count: 0,
        }
    }

    #[test]
    fn zero_quantile_gives_interval_at_theta() {
        let i = interval_from_quantiles(&pe(), RootKind::PercentileT, None, 0.0);
        assert_eq!(i.lower, 10.0);
        assert_eq!(i.upper, f64::INFINITY);
        assert!(!i.contains(10.0));
    }

    #[test]
    fn symmetric_two_sided() {
        let cdf = EmpiricalCdf::new(vec![-1.5, -1.0, 0.0, 1.0, 1.5]);
        // level 0.6: quantiles at 0.2 (-1.5) and 0.8 (1.0) -> not symmetric; use
        // level 0.2 -> 0.4 (-1.0) and 0.6 (0.0)
        let i = single_interval(&pe(), &cdf, RootKind::PercentileT, Side::TwoSided, 0.2).unwrap();
        assert_eq!(i.lower, 10.0);
        assert_eq!(i.upper, 10.0 + 0.5);
        let sym = EmpiricalCdf::new(vec![-2.0, -1.0, 1.0, 2.0]);
        let i = single_interval(&pe(), &sym, RootKind::PercentileT, Side::TwoSided, 0.5).unwrap();
        // quantiles at 0.25 -> -2, 0.75 -> 1
        assert_eq!((i.lower, i.upper), (10.0 - 0.5, 10.0 + 1.0));
        let i = single_interval(&pe(), &sym, RootKind::Percentile, Side::Upper, 0.5).unwrap();
        assert_eq!(i.lower, 10.0 + 0.25);
        assert!(single_interval(&pe(), &sym, RootKind::Percentile, Side::Upper, 1.0).is_err());
    }

    #[test]
    fn identical_roots_self_calibrate() {
        let roots: Vec<f64> = (0..50).map(|i| ((i * 37) % 50) as f64 / 7.0).collect();
        let rs = manual_roots(roots.clone(), roots, 1);
        let cal = calibrate_warp_speed(&rs, 0.9, Side::Upper).unwrap();
        assert!(!cal.out_of_range);
        // with distinct values, R*_b < R**_(k) for exactly k-1 outer roots
        assert!((cal.level - 0.92).abs() < 1e-12, "{}", cal.level);
        assert!((cal.level - 0.9).abs() <= 2.0 / 50.0 + 1e-12);
    }

    #[test]
    fn warp_needs_single_inner() {
        let rs = manual_roots(vec![0.0, 1.0], vec![0.0, 1.0, 2.0, 3.0], 2);
        assert!(matches!(
            calibrate_warp_speed(&rs, 0.9, Side::Upper),
            Err(Error::InvalidPlan(_))
        ));
    }

    #[test]
    fn conventional_with_one_inner_is_flat() {
        let rs = manual_roots(vec![0.0, 1.0, 2.0, 3.0], vec![0.5, 0.5, 2.5, 2.5], 1);
        let p = conventional_coverage(&rs, Side::Upper, 0.3);
        assert_eq!(p, conventional_coverage(&rs, Side::Upper, 0.99));
        let cal = calibrate_conventional(&rs, 0.9, Side::Upper).unwrap();
        assert!(cal.out_of_range);
        assert_eq!(cal.level, 1.0 - 1.0 / 8.0);
    }

    #[test]
    fn constant_data_gives_degenerate_interval() {
        let ds = Dataset::univariate(vec![4.0; 12]).unwrap();
        let plan = BootstrapPlan::new(20, 5, 1).unwrap();
        let roots = compute_roots(&ds, &Identity, &plan).unwrap();
        assert!(roots.outer_roots.iter().all(|&r| r == 0.0));
        assert_eq!(roots.degenerate_count, 20 + 100);
        let cal = calibrate_conventional(&roots, 0.9, Side::TwoSided).unwrap();
        assert_eq!(cal.interval.lower, 4.0);
        assert_eq!(cal.interval.upper, 4.0);
        let pct =
            compute_roots(&ds, &Identity, &plan.with_root_kind(RootKind::Percentile)).unwrap();
        assert!(pct
            .outer_roots
            .iter()
            .chain(&pct.inner_roots)
            .all(|&r| r == 0.0));
    }

    #[test]
    fn first_inner_view_matches_warp_run() {
        let ds = Dataset::univariate(vec![0.5, 2.0, 1.1, 3.7, 0.2, 1.9, 2.8, 0.9]).unwrap();
        let plan = BootstrapPlan::new(30, 6, 8).unwrap().with_trial(2);
        let conv = draw_nested(&ds, &Identity, &plan).unwrap();
        let warp = draw_nested(&ds, &Identity, &plan.with_inner(1)).unwrap();
        assert_eq!(conv.first_inner(), warp);
        assert_eq!(
            conv.prefix(3),
            draw_nested(&ds, &Identity, &plan.with_inner(3)).unwrap()
        );
    }
}
