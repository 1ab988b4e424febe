//! Command-line experiments for the cooperative D2D caching model.

pub mod analysis;
pub mod commands;
pub mod config;
pub mod error;
pub mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::SimulateStrategy;
use crate::config::ExperimentSpec;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "d2d-coop", version, about = "Cooperative D2D caching: analytic optimisation and simulation")]
pub struct Cli {
    /// TOML experiment file; every field defaults to the reference scenario.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Snapshots per simulated campaign.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Zipf exponents to sweep, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    /// Minimum user throughputs in bit/s, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub mu: Option<Vec<f64>>,
    /// CSV destination; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Active cooperative links versus cluster size, and the optimal size.
    OptimizeCluster {
        /// Hotspot user counts to sweep, comma separated.
        #[arg(long, value_delimiter = ',')]
        users: Option<Vec<usize>>,
    },
    /// Optimal bandwidth split versus beta for each mu.
    OptimizeBandwidth,
    /// Simulated throughput of the cooperative strategies and baselines.
    Compare,
    /// Analytic and simulation self-checks; exits 1 if any fails.
    Validate {
        /// Also write the two distance densities to this CSV file.
        #[arg(long)]
        pdf_table: Option<PathBuf>,
        #[arg(long, default_value_t = 201)]
        pdf_points: usize,
    },
    /// One campaign per beta with per-trial records.
    Simulate {
        #[arg(long, value_enum, default_value_t = StrategyArg::Coop)]
        strategy: StrategyArg,
        /// Cooperative band share; the optimum when absent.
        #[arg(long)]
        eta: Option<f64>,
        /// Users per cluster; chosen automatically when absent.
        #[arg(long = "users-per-cluster")]
        users_per_cluster: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Coop,
    Nocoop,
    Tdma,
}

impl Cli {
    /// The configuration file with flag overrides applied.
    pub fn spec(&self) -> CliResult<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => ExperimentSpec::load(path)?,
            None => ExperimentSpec::default(),
        };
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        if let Some(trials) = self.trials {
            spec.trials = trials;
        }
        if let Some(beta) = &self.beta {
            spec.sweep.beta = Some(beta.clone());
        }
        if let Some(mu) = &self.mu {
            spec.sweep.mu_bps = Some(mu.clone());
        }
        if let Command::OptimizeCluster { users: Some(users) } = &self.command {
            spec.sweep.n_users = Some(users.clone());
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn output(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs a parsed command line and returns the summary for the terminal.
pub fn run(cli: &Cli) -> CliResult<String> {
    let spec = cli.spec()?;
    match &cli.command {
        Command::OptimizeCluster { .. } => commands::optimize_cluster(&spec, output(&cli.out)?),
        Command::OptimizeBandwidth => commands::optimize_bandwidth(&spec, output(&cli.out)?),
        Command::Compare => commands::compare(&spec, output(&cli.out)?),
        Command::Simulate { strategy, eta, users_per_cluster } => {
            let strategy = match strategy {
                StrategyArg::Coop => SimulateStrategy::Coop(*eta),
                StrategyArg::Nocoop => SimulateStrategy::NoCoop,
                StrategyArg::Tdma => SimulateStrategy::Tdma,
            };
            commands::simulate(&spec, strategy, *users_per_cluster, output(&cli.out)?)
        }
        Command::Validate { pdf_table, pdf_points } => {
            if let Some(path) = pdf_table {
                commands::pdf_table(*pdf_points, BufWriter::new(File::create(path)?))?;
            }
            let checks = validate::run_checks(&spec)?;
            let (text, failed) = validate::report(&checks);
            if let Some(path) = &cli.out {
                std::fs::write(path, &text)?;
            }
            if failed > 0 {
                eprint!("{text}");
                return Err(CliError::Validation { failed, total: checks.iter().filter(|c| c.passed.is_some()).count() });
            }
            Ok(text)
        }
    }
}
