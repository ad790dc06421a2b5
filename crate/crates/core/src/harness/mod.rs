//! Data generators, experiment configs, runners and report emitters.

pub mod config;
pub mod experiment;
pub mod generator;
pub mod report;

pub use config::{
    BRule, CSpec, ExperimentConfig, ExperimentKind, Format, FunctionalKind, Method, Reference,
};
pub use experiment::{
    bias_rows, coverage_cells, coverage_rows, evaluate_cells, oracle_table, row_seed,
    run_bias_experiment, run_coverage_experiment, run_variance_check, CellOutcome, CoverageCell,
};
pub use generator::{DataGenerator, GeneratorKind};
pub use report::{
    emit, emit_to_string, parse, round_sig, BiasRow, CoverageRow, OracleRow, ReportRow, VarianceRow,
};
