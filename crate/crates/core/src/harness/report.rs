//! Report rows and their CSV / JSON emitters.
//!
//! Floating-point fields are rounded to 6 significant digits before they are
//! written, so parsing an emitted report gives back exactly
//! [`ReportRow::rounded`] of every row.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::config::Format;

/// `x` rounded to 6 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

pub trait ReportRow: Serialize + DeserializeOwned + Clone {
    /// CSV header, in field order.
    const HEADER: &'static [&'static str];

    fn rounded(&self) -> Self;
}

/// One (functional, n, method) cell of a bias table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasRow {
    pub generator: String,
    pub functional: String,
    pub n: usize,
    pub b: usize,
    /// `single`, `C=<k>` or `10sqrtB`.
    pub c_label: String,
    /// Inner count actually used (0 for the single bootstrap).
    pub c: usize,
    pub mean_bias_estimate: f64,
    pub reference_bias: f64,
    pub ratio: f64,
    /// Standard error of `mean_bias_estimate`; empty with one trial.
    pub mc_se: Option<f64>,
    pub trials: usize,
    pub failed: usize,
}

impl ReportRow for BiasRow {
    const HEADER: &'static [&'static str] = &[
        "generator",
        "functional",
        "n",
        "b",
        "c_label",
        "c",
        "mean_bias_estimate",
        "reference_bias",
        "ratio",
        "mc_se",
        "trials",
        "failed",
    ];

    fn rounded(&self) -> Self {
        BiasRow {
            mean_bias_estimate: round_sig(self.mean_bias_estimate),
            reference_bias: round_sig(self.reference_bias),
            ratio: round_sig(self.ratio),
            mc_se: self.mc_se.map(round_sig),
            ..self.clone()
        }
    }
}

/// Empirical coverage of one interval method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub generator: String,
    pub functional: String,
    pub root_kind: String,
    pub side: String,
    pub n: usize,
    pub b: usize,
    /// Inner count behind the method (0 for the single bootstrap).
    pub c: usize,
    pub method: String,
    pub alpha: f64,
    pub coverage: f64,
    /// `sqrt(coverage (1 - coverage) / trials)`; empty with one trial.
    pub mc_se: Option<f64>,
    /// Average nominal level used (the calibrated level for double methods).
    pub mean_level: f64,
    /// Trials whose calibration found no level reaching `alpha`.
    pub out_of_range: usize,
    pub trials: usize,
    pub failed: usize,
}

impl ReportRow for CoverageRow {
    const HEADER: &'static [&'static str] = &[
        "generator",
        "functional",
        "root_kind",
        "side",
        "n",
        "b",
        "c",
        "method",
        "alpha",
        "coverage",
        "mc_se",
        "mean_level",
        "out_of_range",
        "trials",
        "failed",
    ];

    fn rounded(&self) -> Self {
        CoverageRow {
            alpha: round_sig(self.alpha),
            coverage: round_sig(self.coverage),
            mc_se: self.mc_se.map(round_sig),
            mean_level: round_sig(self.mean_level),
            ..self.clone()
        }
    }
}

/// Simulation variance of the corrected estimators on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub generator: String,
    pub functional: String,
    pub n: usize,
    pub b: usize,
    pub c: usize,
    pub reruns: usize,
    pub var_single: f64,
    pub var_double: f64,
    pub ratio: f64,
    /// `4 + 1/C`
    pub target_ratio: f64,
    /// `B n var_single`
    pub scaled_single: f64,
    pub tau_sq_hat: f64,
}

impl ReportRow for VarianceRow {
    const HEADER: &'static [&'static str] = &[
        "generator",
        "functional",
        "n",
        "b",
        "c",
        "reruns",
        "var_single",
        "var_double",
        "ratio",
        "target_ratio",
        "scaled_single",
        "tau_sq_hat",
    ];

    fn rounded(&self) -> Self {
        VarianceRow {
            var_single: round_sig(self.var_single),
            var_double: round_sig(self.var_double),
            ratio: round_sig(self.ratio),
            target_ratio: round_sig(self.target_ratio),
            scaled_single: round_sig(self.scaled_single),
            tau_sq_hat: round_sig(self.tau_sq_hat),
            ..self.clone()
        }
    }
}

/// Analytic reference values for one (law, functional, n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub generator: String,
    pub functional: String,
    pub n: usize,
    pub analytic_bias: f64,
    /// `gamma_2 / (2n)`
    pub leading_term: f64,
    pub tau_squared: f64,
}

impl ReportRow for OracleRow {
    const HEADER: &'static [&'static str] = &[
        "generator",
        "functional",
        "n",
        "analytic_bias",
        "leading_term",
        "tau_squared",
    ];

    fn rounded(&self) -> Self {
        OracleRow {
            analytic_bias: round_sig(self.analytic_bias),
            leading_term: round_sig(self.leading_term),
            tau_squared: round_sig(self.tau_squared),
            ..self.clone()
        }
    }
}

/// Writes `rows` as CSV (header first, even when empty) or as a JSON array.
pub fn emit<R: ReportRow, W: Write>(rows: &[R], format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(out);
            w.write_record(R::HEADER)?;
            for row in rows {
                w.serialize(row.rounded())?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rounded: Vec<R> = rows.iter().map(R::rounded).collect();
            serde_json::to_writer_pretty(&mut out, &rounded)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn emit_to_string<R: ReportRow>(rows: &[R], format: Format) -> Result<String> {
    let mut buf = Vec::new();
    emit(rows, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("reports are UTF-8"))
}

/// Reads rows written by [`emit`].
pub fn parse<R: ReportRow, In: Read>(input: In, format: Format) -> Result<Vec<R>> {
    match format {
        Format::Csv => {
            let mut r = csv::Reader::from_reader(input);
            Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
        }
        Format::Json => Ok(serde_json::from_reader(input)?),
    }
}
