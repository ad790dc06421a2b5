//! Experiment configuration.
//!
//! Config files are flat TOML documents. Every key except `schema_version`
//! and `experiment` has a default taken from the desk profile of the
//! experiment.
//!
//! ```toml
//! schema_version = 1
//! experiment = "bias"            # bias | coverage | variance-check | oracle
//! generator = "exponential"      # exponential (mean 2) | log-normal
//! functionals = ["cube", "sine"] # mean | cube | sine
//! n = [20, 40]
//! b = "square"                   # "square" (B = n^2) or a list such as [500]
//! c = [1, 2, 5, 10, "10sqrtB"]   # inner counts; "10sqrtB" is floor(10 sqrt(B))
//! c_cap = 256                    # cap on "10sqrtB"; 0 removes the cap
//! trials = 2000
//! alpha = [0.9]
//! root_kinds = ["percentile", "percentile-t"]
//! sides = ["upper", "two-sided"]
//! methods = ["single", "conventional-double", "warp-speed"]
//! reference = "analytic"         # analytic | monte-carlo
//! reruns = 500                   # variance-check only
//! seed = 20240601
//! format = "csv"                 # csv | json
//! output = "bias.csv"            # omit to write to stdout
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::{Cube, Identity, Sine, SmoothFunctional};
use crate::harness::generator::GeneratorKind;
use crate::interval::Side;
use crate::model::{sqrt_rule_inner, RootKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Bias,
    Coverage,
    VarianceCheck,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalKind {
    #[serde(alias = "identity")]
    Mean,
    Cube,
    Sine,
}

impl FunctionalKind {
    pub fn functional(self) -> Box<dyn SmoothFunctional> {
        match self {
            FunctionalKind::Mean => Box::new(Identity),
            FunctionalKind::Cube => Box::new(Cube),
            FunctionalKind::Sine => Box::new(Sine),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FunctionalKind::Mean => "mean",
            FunctionalKind::Cube => "cube",
            FunctionalKind::Sine => "sine",
        }
    }
}

/// Outer resample count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BRule {
    /// `"square"`: `B = n^2`.
    Named(String),
    Fixed(Vec<usize>),
}

impl BRule {
    pub fn square() -> Self {
        BRule::Named("square".into())
    }

    pub fn values(&self, n: usize) -> Vec<usize> {
        match self {
            BRule::Named(_) => vec![n * n],
            BRule::Fixed(v) => v.clone(),
        }
    }
}

/// Inner resample count: a number or `"10sqrtB"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CSpec {
    Fixed(usize),
    Named(String),
}

pub const SQRT_RULE_LABEL: &str = "10sqrtB";

impl CSpec {
    pub fn sqrt_rule() -> Self {
        CSpec::Named(SQRT_RULE_LABEL.into())
    }

    pub fn resolve(&self, outer: usize, cap: Option<usize>) -> usize {
        match self {
            CSpec::Fixed(c) => *c,
            CSpec::Named(_) => {
                let c = sqrt_rule_inner(outer);
                cap.map_or(c, |cap| c.min(cap))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            CSpec::Fixed(c) => format!("C={c}"),
            CSpec::Named(_) => SQRT_RULE_LABEL.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Single,
    ConventionalDouble,
    WarpSpeed,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Single => "single",
            Method::ConventionalDouble => "conventional-double",
            Method::WarpSpeed => "warp-speed",
        }
    }
}

/// What the mean bias estimate is divided by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// Two-term analytic bias of the population law.
    Analytic,
    /// Average of `theta_hat - theta` over the same trial datasets.
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: ExperimentKind,
    pub generator: GeneratorKind,
    pub functionals: Vec<FunctionalKind>,
    pub n: Vec<usize>,
    pub b: BRule,
    pub c: Vec<CSpec>,
    pub c_cap: Option<usize>,
    pub trials: usize,
    pub alpha: Vec<f64>,
    pub root_kinds: Vec<RootKind>,
    pub sides: Vec<Side>,
    pub methods: Vec<Method>,
    pub reference: Reference,
    pub reruns: usize,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

/// Same fields, all optional, as read from a file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    experiment: ExperimentKind,
    generator: Option<GeneratorKind>,
    functionals: Option<Vec<FunctionalKind>>,
    n: Option<Vec<usize>>,
    b: Option<BRule>,
    c: Option<Vec<CSpec>>,
    c_cap: Option<usize>,
    trials: Option<usize>,
    alpha: Option<Vec<f64>>,
    root_kinds: Option<Vec<RootKind>>,
    sides: Option<Vec<Side>>,
    methods: Option<Vec<Method>>,
    reference: Option<Reference>,
    reruns: Option<usize>,
    seed: Option<u64>,
    format: Option<Format>,
    output: Option<PathBuf>,
}

const DEFAULT_SEED: u64 = 20240601;

impl ExperimentConfig {
    /// Desk-scale profile: minutes on one core.
    pub fn desk(experiment: ExperimentKind) -> Self {
        let base = ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            experiment,
            generator: GeneratorKind::Exponential,
            functionals: vec![FunctionalKind::Cube, FunctionalKind::Sine],
            n: vec![20, 40],
            b: BRule::square(),
            c: vec![
                CSpec::Fixed(1),
                CSpec::Fixed(2),
                CSpec::Fixed(5),
                CSpec::Fixed(10),
                CSpec::sqrt_rule(),
            ],
            c_cap: Some(256),
            trials: 2000,
            alpha: vec![0.9],
            root_kinds: vec![RootKind::Percentile, RootKind::PercentileT],
            sides: vec![Side::Upper, Side::TwoSided],
            methods: vec![
                Method::Single,
                Method::ConventionalDouble,
                Method::WarpSpeed,
            ],
            reference: Reference::Analytic,
            reruns: 500,
            seed: DEFAULT_SEED,
            format: Format::Csv,
            output: None,
        };
        match experiment {
            ExperimentKind::Bias | ExperimentKind::Oracle => base,
            ExperimentKind::Coverage => ExperimentConfig {
                functionals: vec![FunctionalKind::Mean],
                n: vec![20],
                b: BRule::Fixed(vec![300]),
                c: vec![CSpec::sqrt_rule()],
                ..base
            },
            ExperimentKind::VarianceCheck => ExperimentConfig {
                functionals: vec![FunctionalKind::Cube],
                n: vec![50],
                b: BRule::Fixed(vec![200]),
                c: vec![CSpec::Fixed(1), CSpec::Fixed(64)],
                trials: 1,
                ..base
            },
        }
    }

    /// Full-size grids and trial counts.
    pub fn paper_scale(mut self) -> Self {
        match self.experiment {
            ExperimentKind::Bias | ExperimentKind::Oracle => {
                self.n = vec![20, 40, 60, 80];
                self.b = BRule::square();
                self.c_cap = None;
                self.trials = 5000;
            }
            ExperimentKind::Coverage => {
                self.n = vec![20, 40];
                self.b = BRule::Fixed((2..=7).map(|k| k * 100).collect());
                self.c_cap = None;
                self.trials = 5000;
            }
            ExperimentKind::VarianceCheck => {
                self.b = BRule::Fixed(vec![1000]);
                self.reruns = 2000;
            }
        }
        self
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                raw.schema_version
            )));
        }
        let d = ExperimentConfig::desk(raw.experiment);
        let cfg = ExperimentConfig {
            schema_version: raw.schema_version,
            experiment: raw.experiment,
            generator: raw.generator.unwrap_or(d.generator),
            functionals: raw.functionals.unwrap_or(d.functionals),
            n: raw.n.unwrap_or(d.n),
            b: raw.b.unwrap_or(d.b),
            c: raw.c.unwrap_or(d.c),
            c_cap: match raw.c_cap {
                Some(0) => None,
                Some(cap) => Some(cap),
                None => d.c_cap,
            },
            trials: raw.trials.unwrap_or(d.trials),
            alpha: raw.alpha.unwrap_or(d.alpha),
            root_kinds: raw.root_kinds.unwrap_or(d.root_kinds),
            sides: raw.sides.unwrap_or(d.sides),
            methods: raw.methods.unwrap_or(d.methods),
            reference: raw.reference.unwrap_or(d.reference),
            reruns: raw.reruns.unwrap_or(d.reruns),
            seed: raw.seed.unwrap_or(d.seed),
            format: raw.format.unwrap_or(d.format),
            output: raw.output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema_version {}",
                self.schema_version
            ));
        }
        if self.functionals.is_empty() || self.n.is_empty() || self.alpha.is_empty() {
            return bad("functionals, n and alpha must be non-empty".into());
        }
        if self.experiment == ExperimentKind::Coverage
            && (self.root_kinds.is_empty() || self.sides.is_empty() || self.methods.is_empty())
        {
            return bad("root_kinds, sides and methods must be non-empty".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if let Some(&n) = self.n.iter().find(|&&n| n < 2) {
            return bad(format!("n must be at least 2, got {n}"));
        }
        if let Some(&a) = self.alpha.iter().find(|&&a| !(a > 0.0 && a < 1.0)) {
            return bad(format!("alpha must lie in (0, 1), got {a}"));
        }
        match &self.b {
            BRule::Named(s) if s != "square" => return bad(format!("unknown B rule {s:?}")),
            BRule::Fixed(v) if v.is_empty() || v.contains(&0) => {
                return bad("b must be \"square\" or a non-empty list of positive counts".into())
            }
            _ => {}
        }
        for c in &self.c {
            match c {
                CSpec::Fixed(0) => return bad("inner counts must be positive".into()),
                CSpec::Named(s) if s != SQRT_RULE_LABEL => {
                    return bad(format!(
                        "unknown inner count {s:?} (use a number or \"{SQRT_RULE_LABEL}\")"
                    ))
                }
                _ => {}
            }
        }
        if self.c_cap == Some(0) {
            return bad("c_cap must be positive; leave it unset for no cap".into());
        }
        if self.experiment == ExperimentKind::VarianceCheck && self.reruns < 500 {
            return bad(format!("reruns must be at least 500, got {}", self.reruns));
        }
        if self.experiment == ExperimentKind::VarianceCheck && self.c.is_empty() {
            return bad("variance-check needs at least one inner count".into());
        }
        Ok(())
    }
}
