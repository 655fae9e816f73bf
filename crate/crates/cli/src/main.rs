//! Command-line surface for lurking-variable detection.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};

use commands::EXIT_ERROR;
use config::{resolve, Resolved, RunConfig};

#[derive(Parser)]
#[command(
    name = "lurkvar",
    about = "Lurking-variable detection via dimensional analysis and Hotelling's T2 test",
    long_about = "Certifies dimensional homogeneity analytically and tests experimental data \
                  for fixed lurking variables. Exit codes: 0 = no detection, 2 = lurking \
                  variable detected, 1 = error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration (schema 1).
    #[arg(long)]
    config: PathBuf,
    /// Seed override; echoed into outputs.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (0 = library default).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic homogeneity check of the exposed set against the qoi.
    Analyze(Common),
    /// Print the canonical non-dimensionalizing vector and pi groups.
    Nondim(Common),
    /// Run the detection test on a data table (physical units).
    Detect {
        #[command(flatten)]
        common: Common,
        /// CSV data table with exposed-variable and qoi columns.
        #[arg(long)]
        data: PathBuf,
    },
    /// Generate a virtual-experiment data table from a built-in model.
    Simulate(Common),
    /// Monte Carlo sweep over (n, tau) cells; emits the sweep CSV schema.
    Sweep(Common),
    /// Predicted power table for a given effect size k.
    Power {
        /// Effect size k in [0, 1).
        #[arg(long)]
        k: f64,
        /// Comma-separated sample counts.
        #[arg(long, value_delimiter = ',', default_value = "100,400,1600,6400")]
        n_grid: Vec<usize>,
        /// Score dimension.
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// Significance level.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// List the built-in models.
    Models,
}

fn load(common: &Common) -> Result<(RunConfig, Resolved, u64)> {
    let cfg = RunConfig::load(&common.config)?;
    let resolved = resolve(&cfg)?;
    let seed = common.seed.or(cfg.seed).unwrap_or(0);
    Ok((cfg, resolved, seed))
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze(common) => {
            let (_, resolved, _) = load(&common)?;
            commands::cmd_analyze(&resolved)
        }
        Command::Nondim(common) => {
            let (_, resolved, _) = load(&common)?;
            commands::cmd_nondim(&resolved)
        }
        Command::Detect { common, data } => {
            let (cfg, resolved, seed) = load(&common)?;
            commands::cmd_detect(&resolved, &cfg.qoi_column, &data, common.out.as_ref(), seed)
        }
        Command::Simulate(common) => {
            let (cfg, resolved, seed) = load(&common)?;
            let n = cfg
                .n
                .ok_or_else(|| anyhow!("simulate needs `n` in the config"))?;
            let out = common
                .out
                .ok_or_else(|| anyhow!("simulate needs --out for the data table"))?;
            commands::cmd_simulate(&resolved, n, cfg.tau, seed, &out)
        }
        Command::Sweep(common) => {
            let (cfg, resolved, seed) = load(&common)?;
            let n_grid = cfg
                .n_grid
                .clone()
                .ok_or_else(|| anyhow!("sweep needs `n_grid` in the config"))?;
            let tau_grid = cfg.tau_grid.clone().unwrap_or_else(|| vec![cfg.tau]);
            let out = common
                .out
                .ok_or_else(|| anyhow!("sweep needs --out for the results CSV"))?;
            let parallelism = common.threads.unwrap_or(cfg.parallelism);
            commands::cmd_sweep(
                &resolved,
                n_grid,
                tau_grid,
                cfg.replications,
                seed,
                parallelism,
                &out,
            )
        }
        Command::Power {
            k,
            n_grid,
            d,
            alpha,
        } => commands::cmd_power(k, &n_grid, d, alpha),
        Command::Models => commands::cmd_models(),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
