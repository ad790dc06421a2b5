//! Distributional checks against closed-form laws and independent
//! simulation.

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Exp, LogNormal, Normal};

use warpboot::harness::DataGenerator;
use warpboot::interval::{single_interval, RootSample};
use warpboot::oracle::{analytic_bias, tau_squared, MomentSet};
use warpboot::{
    compute_roots, draw_nested, BootstrapPlan, Cube, EmpiricalCdf, Identity, RootKind, SeedPath,
    Side, Sine, SmoothFunctional,
};

/// Two-sided Kolmogorov critical value at level 0.001, `1.9495 / sqrt(n)`.
fn ks_critical(n: usize) -> f64 {
    1.9495 / (n as f64).sqrt()
}

fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn exponential_passes_ks() {
    let xs = DataGenerator::exponential_mean_two().sample(100_000, 11, SeedPath::data(0));
    let law = Exp::new(0.5).unwrap();
    let d = ks_statistic(xs, |x| law.cdf(x));
    assert!(d < ks_critical(100_000), "D = {d}");
}

#[test]
fn lognormal_passes_ks() {
    let xs = DataGenerator::LogNormal.sample(100_000, 12, SeedPath::data(0));
    let law = LogNormal::new(0.0, 1.0).unwrap();
    let d = ks_statistic(xs, |x| law.cdf(x));
    assert!(d < ks_critical(100_000), "D = {d}");
}

fn central(xs: &[f64], k: i32) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (mean, xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / n)
}

#[test]
fn exponential_moments_within_four_se() {
    let n = 1_000_000;
    let xs = DataGenerator::exponential_mean_two().sample(n, 13, SeedPath::data(1));
    let nf = n as f64;
    // central moments of an exponential with mean t: t^2, 2t^3, 9t^4, 44t^5, 265t^6
    let t: f64 = 2.0;
    let (mean, m2) = central(&xs, 2);
    let (_, m3) = central(&xs, 3);
    assert!((mean - 2.0).abs() < 4.0 * (t * t / nf).sqrt());
    assert!((m2 - 4.0).abs() < 4.0 * ((9.0 - 1.0) * t.powi(4) / nf).sqrt());
    // var of the sample third moment: mu6 - mu3^2 - 6 mu4 mu2 + 9 mu2^3
    let v3 = (265.0 - 4.0 - 54.0 + 9.0) * t.powi(6);
    assert!((m3 - 16.0).abs() < 4.0 * (v3 / nf).sqrt());
}

#[test]
fn lognormal_moments_within_four_se() {
    let n = 1_000_000;
    let xs = DataGenerator::LogNormal.sample(n, 14, SeedPath::data(2));
    let nf = n as f64;
    let raw = |k: f64| (k * k / 2.0).exp();
    let mu = raw(1.0);
    let var = raw(2.0) - mu * mu;
    let mu4 = raw(4.0) - 4.0 * mu * raw(3.0) + 6.0 * mu * mu * raw(2.0) - 3.0 * mu.powi(4);
    let e = std::f64::consts::E;
    assert!((mu - e.sqrt()).abs() < 1e-12 && (var - e * (e - 1.0)).abs() < 1e-12);
    let (mean, m2) = central(&xs, 2);
    assert!((mean - mu).abs() < 4.0 * (var / nf).sqrt());
    assert!((m2 - var).abs() < 4.0 * ((mu4 - var * var) / nf).sqrt());
    let pop = DataGenerator::LogNormal.moments();
    let mu3 = raw(3.0) - 3.0 * mu * raw(2.0) + 2.0 * mu.powi(3);
    assert!((pop.third - mu3).abs() < 1e-9 * mu3);
}

#[test]
fn rng_below_is_uniform() {
    // chi-square with 6 degrees of freedom, 0.001 critical value 22.458
    let mut s = SeedPath::outer(5, 5).stream(99);
    let mut counts = [0u64; 7];
    let draws = 700_000;
    for _ in 0..draws {
        counts[s.below(7) as usize] += 1;
    }
    let e = draws as f64 / 7.0;
    let chi: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    assert!(chi < 22.458, "chi-square {chi}");
}

#[test]
fn uniform_quantile_concentrates() {
    let mut s = SeedPath::data(3).stream(5);
    let b = 10_000;
    let cdf = EmpiricalCdf::new((0..b).map(|_| s.uniform()).collect());
    let q = cdf.quantile(0.9).unwrap();
    assert!((q - 0.9).abs() < 4.0 * (0.9 * 0.1 / b as f64).sqrt());
}

fn sum_sim(trials: u64, n: usize, f: &dyn SmoothFunctional, seed: u64) -> (f64, f64) {
    let gen = DataGenerator::exponential_mean_two();
    let vals: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let xs = gen.sample(n, seed, SeedPath::data(t));
            f.value(&[xs.iter().sum::<f64>() / n as f64])
        })
        .collect();
    let m = vals.iter().sum::<f64>() / trials as f64;
    let v = vals.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (trials - 1) as f64;
    (m, (v / trials as f64).sqrt())
}

#[test]
fn cube_bias_matches_exact_and_simulation() {
    let m = MomentSet::population(2.0, 4.0, 16.0);
    let a = analytic_bias(&Cube, &m, 20).unwrap();
    // the mean of 20 exponentials is Gamma(20, 1/10): E(X_bar^3) = 8 (1 + 1/n)(1 + 2/n)
    let exact = 8.0 * (1.0 + 1.0 / 20.0) * (1.0 + 2.0 / 20.0) - 8.0;
    assert!((a - exact).abs() < 1e-12);
    let (mean, se) = sum_sim(10_000_000, 20, &Cube, 21);
    assert!(
        (mean - 8.0 - 1.24).abs() < 4.0 * se,
        "{} +- {se}",
        mean - 8.0
    );
}

#[test]
fn sine_bias_against_closed_form_and_simulation() {
    let n = 20;
    let m = MomentSet::population(2.0, 4.0, 16.0);
    let two_term = analytic_bias(&Sine, &m, n).unwrap();
    let lead = -(2.0f64).sin() * 4.0 / (2.0 * n as f64);
    assert!((lead + 0.0909).abs() < 1e-4);
    // E sin(X_bar) = Im (1 - 2i/n)^-n for the mean of n exponentials with mean 2
    let (re, im) = (1.0f64, -2.0 / n as f64);
    let (r, phi) = ((re * re + im * im).sqrt(), im.atan2(re));
    let exact = r.powi(-(n as i32)) * (-(n as f64) * phi).sin() - (2.0f64).sin();
    assert!((exact + 0.083644).abs() < 1e-6, "{exact}");
    assert!((two_term - exact).abs() < 1e-4);
    let (mean, se) = sum_sim(10_000_000, n, &Sine, 22);
    let sim = mean - (2.0f64).sin();
    assert!(
        (sim - two_term).abs() < 3.0 * se,
        "{sim} vs {two_term} +- {se}"
    );
    assert!((sim - exact).abs() < 3.0 * se, "{sim} vs {exact} +- {se}");
    println!("sine bias: two-term {two_term:.6}, exact {exact:.6}, simulated {sim:.6} +- {se:.6}");
}

#[test]
fn cube_tau_squared_matches_scaled_variance() {
    let m = MomentSet::population(2.0, 4.0, 16.0);
    assert_eq!(tau_squared(&Cube, &m), 576.0);
    let n = 500;
    let gen = DataGenerator::exponential_mean_two();
    let trials = 100_000u64;
    let vals: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let xs = gen.sample(n, 23, SeedPath::data(t));
            (n as f64).sqrt() * ((xs.iter().sum::<f64>() / n as f64).powi(3) - 8.0)
        })
        .collect();
    let mean = vals.iter().sum::<f64>() / trials as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
    // higher-order terms add about 2% at n = 500; sampling error is about 0.5%
    assert!((var / 576.0 - 1.0).abs() < 0.05, "{var}");
}

fn standard_normal() -> DataGenerator {
    let z = Normal::standard();
    DataGenerator::custom(
        "normal",
        move |u| z.inverse_cdf(u),
        MomentSet::population(0.0, 1.0, 0.0),
    )
}

#[test]
fn studentized_roots_are_centred_with_unit_spread() {
    let ds = standard_normal()
        .generate(50, 31, SeedPath::data(0))
        .unwrap();
    let b = 10_000;
    let plan = BootstrapPlan::new(b, 1, 32)
        .unwrap()
        .with_root_kind(RootKind::PercentileT);
    let roots = compute_roots(&ds, &Identity, &plan).unwrap();
    let r = &roots.outer_roots;
    let mean = r.iter().sum::<f64>() / b as f64;
    let var = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (b - 1) as f64;
    // E*(root) = -skew_hat / (2 sqrt(n)) + O(n^-3/2): the sample's own skewness
    // shifts the bootstrap distribution, so centre on that term
    let xs = ds.column(0);
    let (_, m2) = central(xs, 2);
    let (_, m3) = central(xs, 3);
    let shift = -(m3 / m2.powf(1.5)) / (2.0 * 50f64.sqrt());
    println!("root mean {mean:.4}, skewness shift {shift:.4}, variance {var:.4}");
    assert!(
        (mean - shift).abs() < 4.0 / (b as f64).sqrt() + 50f64.powf(-1.5),
        "{mean} vs {shift}"
    );
    assert!((var - 1.0).abs() < 0.1, "{var}");
    assert_eq!(roots.degenerate_count, 0);
}

#[test]
fn percentile_t_single_interval_covers_normal_mean() {
    let gen = standard_normal();
    let trials = 5000u64;
    let covered: usize = (0..trials)
        .into_par_iter()
        .map(|t| {
            let ds = gen.generate(40, 41, SeedPath::data(t)).unwrap();
            let plan = BootstrapPlan::new(10_000, 1, 42).unwrap().with_trial(t);
            let draws = draw_nested(&ds, &Identity, &plan).unwrap();
            let roots = RootSample::from_draws(&draws, RootKind::PercentileT);
            let i = single_interval(
                &roots.estimate,
                &roots.outer_cdf(),
                RootKind::PercentileT,
                Side::Upper,
                0.9,
            )
            .unwrap();
            usize::from(i.contains(0.0))
        })
        .sum();
    let cov = covered as f64 / trials as f64;
    assert!((cov - 0.9).abs() < 0.02, "{cov}");
}
