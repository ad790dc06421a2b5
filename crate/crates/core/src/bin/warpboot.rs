use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use warpboot::harness::{
    emit, oracle_table, run_bias_experiment, run_coverage_experiment, run_variance_check,
    ExperimentConfig, ExperimentKind, Format, ReportRow,
};
use warpboot::Error;

#[derive(Parser)]
#[command(
    name = "warpboot",
    version,
    about = "Bootstrap bias-correction and coverage experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bias-estimate table (single and double bootstrap).
    Bias(Common),
    /// Coverage of single, conventional double and warp-speed intervals.
    Coverage(Common),
    /// Simulation variance of the corrected estimators on a fixed dataset.
    VarianceCheck(Common),
    /// Analytic bias and tau^2 of the configured law and functionals.
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config; defaults to the desk profile of the subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads (output does not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
    /// Full-size grids instead of the desk profile.
    #[arg(long)]
    paper_scale: bool,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(format!("unknown format {s:?} (csv or json)")),
    }
}

fn load(kind: ExperimentKind, args: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::desk(kind),
    };
    if cfg.experiment != kind {
        return Err(Error::Config(format!(
            "config is for experiment {:?}, not {:?}",
            cfg.experiment, kind
        )));
    }
    if args.paper_scale {
        cfg = cfg.paper_scale();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(format) = args.format {
        cfg.format = format;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_rows<R: ReportRow>(cfg: &ExperimentConfig, rows: &[R]) -> Result<(), Error> {
    match &cfg.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            emit(rows, cfg.format, &mut w)?;
            w.flush()?;
        }
        None => emit(rows, cfg.format, io::stdout().lock())?,
    }
    Ok(())
}

fn run(kind: ExperimentKind, args: &Common) -> Result<(), Error> {
    let cfg = load(kind, args)?;
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    match kind {
        ExperimentKind::Bias => write_rows(&cfg, &run_bias_experiment(&cfg)?),
        ExperimentKind::Coverage => write_rows(&cfg, &run_coverage_experiment(&cfg)?),
        ExperimentKind::VarianceCheck => write_rows(&cfg, &run_variance_check(&cfg)?),
        ExperimentKind::Oracle => write_rows(&cfg, &oracle_table(&cfg)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Bias(a) => (ExperimentKind::Bias, a),
        Command::Coverage(a) => (ExperimentKind::Coverage, a),
        Command::VarianceCheck(a) => (ExperimentKind::VarianceCheck, a),
        Command::Oracle(a) => (ExperimentKind::Oracle, a),
    };
    match run(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("warpboot: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
