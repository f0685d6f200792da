//! `skelab` — configuration-driven experiments for the Levy-driven
//! kinetic equation: noise fidelity checks, moment-growth fits, scaling
//! limits, critical-line ergodics, triplet limits, and path metrics.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use ske_cli::{branches, config::ExperimentConfig, experiments};

#[derive(Parser)]
#[command(name = "skelab", about = "Kinetic-SDE simulation experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config file.
    Run {
        /// Path to the experiment config.
        config: PathBuf,
        /// Override the config's RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores). Results are byte-identical
        /// for any value.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the moment-exponent / critical-line table.
    Branches {
        /// Stability indices to tabulate (repeatable).
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<f64>,
        /// Homogeneity exponents to tabulate (repeatable).
        #[arg(long, value_delimiter = ',')]
        gamma: Vec<f64>,
        /// Drift decay exponent.
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        /// Tail-moment order for the finite-moment regime.
        #[arg(long)]
        alpha0: Option<f64>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> anyhow::Result<bool> {
    match Cli::parse().command {
        Command::Run { config, seed, out, jobs } => {
            if let Some(j) = jobs {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(j)
                    .build_global()
                    .context("initializing the worker pool")?;
            }
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = ExperimentConfig::from_toml(&text)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let out_dir = out
                .or_else(|| cfg.out.clone().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from(format!("out-{}", cfg.kind.label())));
            let report = experiments::run(&cfg, &out_dir)?;
            report.print_verdicts();
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            Ok(report.all_pass())
        }
        Command::Branches { alpha, gamma, beta, alpha0 } => {
            let alphas = if alpha.is_empty() { vec![0.5, 1.5] } else { alpha };
            let gammas = if gamma.is_empty() { vec![0.0, 0.3, 0.5, 1.0] } else { gamma };
            let rows = branches::branch_table(&alphas, &gammas, beta, alpha0);
            branches::print_table(&rows);
            Ok(true)
        }
    }
}
