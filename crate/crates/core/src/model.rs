//! Observed data, dependence structure and run configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension `p`.
pub const MAX_DIM: usize = 8;

/// How the entries of a dataset depend on each other, which fixes how they
/// are resampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DependenceModel {
    /// Rows `(X_1i, ..., X_pi)` are i.i.d. vectors; all columns have length `n`
    /// and whole rows are resampled.
    VectorIid,
    /// Every entry is independent; column `j` has its own length `n_j` and
    /// columns are resampled independently.
    ComponentwiseIndependent,
}

/// The observed sample. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    model: DependenceModel,
    columns: Vec<Vec<f64>>,
    // first value of each column; moment accumulation works on x - shift so
    // that constant columns give exactly zero spread
    shifts: Vec<f64>,
}

impl Dataset {
    /// Builds and validates a dataset.
    pub fn new(model: DependenceModel, columns: Vec<Vec<f64>>) -> Result<Self> {
        let ds = Self::unvalidated(model, columns);
        validate_dataset(&ds)?;
        Ok(ds)
    }

    /// Builds a dataset without checking the invariants. Resampling code
    /// tolerates any non-empty columns, but estimators assume a validated
    /// dataset.
    pub fn unvalidated(model: DependenceModel, columns: Vec<Vec<f64>>) -> Self {
        let shifts = columns
            .iter()
            .map(|c| c.first().copied().unwrap_or(0.0))
            .collect();
        Dataset {
            model,
            columns,
            shifts,
        }
    }

    /// A single column of i.i.d. observations.
    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        Self::new(DependenceModel::VectorIid, vec![values])
    }

    /// Vector-i.i.d. data given as rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::with_capacity(rows.len()); p];
        for row in rows {
            if row.len() != p {
                return Err(Error::DimensionMismatch {
                    lengths: rows.iter().map(Vec::len).collect(),
                });
            }
            for (col, &x) in columns.iter_mut().zip(row) {
                col.push(x);
            }
        }
        Self::new(DependenceModel::VectorIid, columns)
    }

    pub fn model(&self) -> DependenceModel {
        self.model
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// `n_j`, the length of column `j`.
    pub fn len_of(&self, j: usize) -> usize {
        self.columns[j].len()
    }

    /// The `n` used for root-n scaling: the common length under
    /// [`DependenceModel::VectorIid`], the smallest `n_j` otherwise.
    pub fn n_eff(&self) -> usize {
        self.columns.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub(crate) fn shift(&self, j: usize) -> f64 {
        self.shifts[j]
    }

    /// Applies `x -> scale * x + offset` to every observation.
    pub fn affine(&self, scale: f64, offset: f64) -> Dataset {
        Dataset::unvalidated(
            self.model,
            self.columns
                .iter()
                .map(|c| c.iter().map(|&x| scale * x + offset).collect())
                .collect(),
        )
    }
}

/// Checks every dataset invariant.
pub fn validate_dataset(ds: &Dataset) -> Result<()> {
    if ds.columns.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if ds.columns.len() > MAX_DIM {
        return Err(Error::DimensionTooLarge(ds.columns.len()));
    }
    let lengths: Vec<usize> = ds.columns.iter().map(Vec::len).collect();
    if ds.model == DependenceModel::VectorIid && lengths.iter().any(|&l| l != lengths[0]) {
        return Err(Error::DimensionMismatch { lengths });
    }
    if let Some((column, &len)) = lengths.iter().enumerate().find(|(_, &l)| l < 2) {
        return Err(Error::TooFewObservations { column, len });
    }
    Ok(())
}

/// Componentwise sample mean, `n_j^-1 sum_i X_ji`.
pub fn sample_mean(ds: &Dataset) -> Vec<f64> {
    (0..ds.dim())
        .map(|j| {
            let col = ds.column(j);
            let shift = ds.shift(j);
            let mut acc = 0.0;
            for &x in col {
                acc += x - shift;
            }
            shift + acc / col.len() as f64
        })
        .collect()
}

/// Root used for interval construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootKind {
    /// `n^{1/2} (theta_hat - theta)`
    Percentile,
    /// `n^{1/2} (theta_hat - theta) / sigma_hat`
    PercentileT,
}

impl RootKind {
    pub fn label(self) -> &'static str {
        match self {
            RootKind::Percentile => "percentile",
            RootKind::PercentileT => "percentile-t",
        }
    }
}

/// Full specification of one resampling run: `B` outer resamples, `C` inner
/// resamples per outer resample, and the streams to draw them from.
///
/// Warp-speed runs are plans with `inner == 1`; there is no separate mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapPlan {
    pub outer: usize,
    pub inner: usize,
    pub seed: u64,
    /// Selects the stream family within `seed`; experiments use the trial
    /// index, variance checks the re-run index.
    pub trial: u64,
    pub root_kind: RootKind,
}

impl BootstrapPlan {
    pub fn new(outer: usize, inner: usize, seed: u64) -> Result<Self> {
        if outer == 0 || inner == 0 {
            return Err(Error::InvalidPlan(format!(
                "B and C must be at least 1 (got B={outer}, C={inner})"
            )));
        }
        if outer > u32::MAX as usize || inner > u32::MAX as usize {
            return Err(Error::InvalidPlan("B or C too large".into()));
        }
        Ok(BootstrapPlan {
            outer,
            inner,
            seed,
            trial: 0,
            root_kind: RootKind::PercentileT,
        })
    }

    /// `C = 1`.
    pub fn warp_speed(outer: usize, seed: u64) -> Result<Self> {
        Self::new(outer, 1, seed)
    }

    /// `C = floor(10 B^{1/2})`.
    pub fn conventional(outer: usize, seed: u64) -> Result<Self> {
        Self::new(outer, sqrt_rule_inner(outer), seed)
    }

    pub fn with_trial(mut self, trial: u64) -> Self {
        self.trial = trial;
        self
    }

    pub fn with_root_kind(mut self, root_kind: RootKind) -> Self {
        self.root_kind = root_kind;
        self
    }

    pub fn with_inner(mut self, inner: usize) -> Self {
        self.inner = inner;
        self
    }
}

/// `floor(10 sqrt(B))`, computed exactly as the largest `c` with `c^2 <= 100 B`.
pub fn sqrt_rule_inner(outer: usize) -> usize {
    let target = 100u128 * outer as u128;
    let mut c = (target as f64).sqrt() as u128;
    while c * c > target {
        c -= 1;
    }
    while (c + 1) * (c + 1) <= target {
        c += 1;
    }
    c as usize
}
