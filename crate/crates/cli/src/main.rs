//! `dip` command line: run Monte Carlo sweeps and dump realizations.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dip_core::experiment::{realization_for, run_experiment, write_bundle, ExperimentConfig, OUTPUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "dip", version, about = "Dynamic iterative pursuit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a config file and write the result CSV.
    Run(Common),
    /// Like `run`, with per-axis grid overrides.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// SMNR grid in dB, comma separated.
        #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
        smnr_db: Option<String>,
        /// Measurement-rate grid M/N, comma separated.
        #[arg(long, value_name = "LIST")]
        kappa: Option<String>,
        /// Mixture-factor grid, comma separated.
        #[arg(long, value_name = "LIST")]
        nu: Option<String>,
        /// Algorithms to compare: omp, dip, rdip, genie.
        #[arg(long, value_name = "LIST")]
        algorithms: Option<String>,
    },
    /// Dump one simulated realization as a CSV bundle.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Monte Carlo run index whose realization is dumped.
        #[arg(long, default_value_t = 0)]
        run: u64,
        /// Grid point index (sweep order) whose parameters are used.
        #[arg(long, default_value_t = 0)]
        point: usize,
    },
}

#[derive(Args)]
struct Common {
    /// Config file (`key = value` lines).
    config: PathBuf,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo run count.
    #[arg(long)]
    runs: Option<u64>,
    /// Output path: CSV file for `run`/`sweep`, directory for `generate`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override any config key, e.g. `--set alpha=-0.5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

/// Marks errors caused by the invocation rather than the computation.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(e: dip_core::Error) -> anyhow::Error {
    if e.is_usage() {
        Usage(e.to_string()).into()
    } else {
        e.into()
    }
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Usage(format!("cannot read config {}: {e}", common.config.display())))?;
    let mut config = ExperimentConfig::parse(&text).map_err(usage)?;
    for pair in &common.overrides {
        let (key, value) = pair.split_once('=').ok_or_else(|| Usage(format!("`--set {pair}`: expected KEY=VALUE")))?;
        config.set(key.trim(), value.trim()).map_err(usage)?;
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(runs) = common.runs {
        config.runs = runs;
    }
    Ok(config)
}

fn sweep(mut config: ExperimentConfig, out: Option<&Path>) -> Result<()> {
    if let Some(out) = out {
        config.output_path = Some(out.to_path_buf());
    }
    config.validate().map_err(usage)?;
    let table = run_experiment(&config)?;
    let path = config.resolve_output_path();
    table.write_csv(&path).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {} records to {}", table.records.len(), path.display());
    Ok(())
}

fn generate(config: &ExperimentConfig, out: Option<&Path>, run: u64, point: usize) -> Result<()> {
    config.validate().map_err(usage)?;
    let grid = config.grid();
    let p = grid
        .get(point)
        .ok_or_else(|| Usage(format!("grid point {point} out of range (grid has {} points)", grid.len())))?;
    let dir = match out {
        Some(dir) => dir.to_path_buf(),
        None => std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| ".".into()).join("bundle"),
    };
    let realization = realization_for(config, p, run)?;
    write_bundle(&dir, &realization).with_context(|| format!("writing bundle to {}", dir.display()))?;
    eprintln!("wrote realization (seed {}, run {run}, point {point}) to {}", config.seed, dir.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(common) => sweep(load(&common)?, common.out.as_deref()),
        Command::Sweep { common, smnr_db, kappa, nu, algorithms } => {
            let mut config = load(&common)?;
            for (key, value) in [("smnr_db", smnr_db), ("kappa", kappa), ("nu", nu), ("algorithms", algorithms)] {
                if let Some(value) = value {
                    config.set(key, &value).map_err(usage)?;
                }
            }
            sweep(config, common.out.as_deref())
        }
        Command::Generate { common, run, point } => generate(&load(&common)?, common.out.as_deref(), run, point),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Usage>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
