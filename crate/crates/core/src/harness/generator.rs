//! Data-generating laws for simulation trials.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::Result;
use crate::model::Dataset;
use crate::oracle::MomentSet;
use crate::rng::SeedPath;

/// A univariate law sampled by inverse CDF.
#[derive(Clone)]
pub enum DataGenerator {
    /// Density `rate exp(-rate x)` on `x > 0`.
    Exponential { rate: f64 },
    /// `exp(Z)` with `Z` standard normal.
    LogNormal,
    Custom {
        name: String,
        inverse_cdf: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        moments: MomentSet,
    },
}

impl fmt::Debug for DataGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DataGenerator({})", self.label())
    }
}

/// Generator names accepted in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// Exponential with mean 2.
    Exponential,
    LogNormal,
}

impl GeneratorKind {
    pub fn generator(self) -> DataGenerator {
        match self {
            GeneratorKind::Exponential => DataGenerator::exponential_mean_two(),
            GeneratorKind::LogNormal => DataGenerator::LogNormal,
        }
    }
}

impl DataGenerator {
    pub fn exponential_mean_two() -> Self {
        DataGenerator::Exponential { rate: 0.5 }
    }

    pub fn custom(
        name: &str,
        inverse_cdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        moments: MomentSet,
    ) -> Self {
        DataGenerator::Custom {
            name: name.to_string(),
            inverse_cdf: Arc::new(inverse_cdf),
            moments,
        }
    }

    pub fn label(&self) -> String {
        match self {
            DataGenerator::Exponential { rate } if *rate == 0.5 => "exponential".into(),
            DataGenerator::Exponential { rate } => format!("exponential({rate})"),
            DataGenerator::LogNormal => "lognormal".into(),
            DataGenerator::Custom { name, .. } => name.clone(),
        }
    }

    /// Population mean, variance and third central moment.
    pub fn moments(&self) -> MomentSet {
        match self {
            DataGenerator::Exponential { rate } => {
                let m = 1.0 / rate;
                MomentSet::population(m, m * m, 2.0 * m * m * m)
            }
            DataGenerator::LogNormal => {
                let e = std::f64::consts::E;
                MomentSet::population(
                    e.sqrt(),
                    e * (e - 1.0),
                    e.powf(1.5) * (e - 1.0).powi(2) * (e + 2.0),
                )
            }
            DataGenerator::Custom { moments, .. } => *moments,
        }
    }

    /// `F^-1(u)` for `u` in `(0, 1)`.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        match self {
            // -ln(u) has the same law as -ln(1 - u) and keeps precision near 0
            DataGenerator::Exponential { rate } => -u.ln() / rate,
            DataGenerator::LogNormal => standard_normal().inverse_cdf(u).exp(),
            DataGenerator::Custom { inverse_cdf, .. } => inverse_cdf(u),
        }
    }

    /// `n` i.i.d. draws from the stream at `path`.
    pub fn sample(&self, n: usize, master: u64, path: SeedPath) -> Vec<f64> {
        let mut stream = path.stream(master);
        (0..n)
            .map(|_| self.inverse_cdf(stream.open_uniform()))
            .collect()
    }

    /// Univariate dataset of `n` draws.
    pub fn generate(&self, n: usize, master: u64, path: SeedPath) -> Result<Dataset> {
        Dataset::univariate(self.sample(n, master, path))
    }
}

fn standard_normal() -> Normal {
    Normal::standard()
}
