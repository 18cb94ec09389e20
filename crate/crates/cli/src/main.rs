//! `distwarm`: ingest station files, run the warming tests, compare regions,
//! check the trend test by simulation and export plot-ready tables.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use distwarm::sim::SuiteSelector;
use distwarm::warming::Period;

use config::{Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "distwarm",
    version,
    about = "Trend tests on annual temperature distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true, env = "DISTWARM_CONFIG")]
    config: Option<PathBuf>,

    /// Sample period START-END; repeat for several.
    #[arg(long = "period", global = true, value_parser = parse_period)]
    periods: Vec<Period>,

    /// First year of the late segment in the acceleration test.
    #[arg(long, global = true)]
    split_year: Option<i32>,

    /// Significance level of the typology and dominance verdicts.
    #[arg(long, global = true)]
    level: Option<f64>,

    /// HAC bandwidth (default: Newey-West rule).
    #[arg(long, global = true)]
    bandwidth: Option<usize>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// More log output (-v, -vv).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write each dataset's characteristic matrix, rejects and raw samples.
    Ingest,
    /// Run the full test battery on every primary dataset.
    Analyze,
    /// Dominance of dataset A over dataset B.
    Compare {
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
    },
    /// Monte Carlo rate checks of the trend test.
    Simulate {
        /// beta, tstat or all.
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: SuiteSelector,
        /// Replications per length.
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Heatmap and bar exports from a previous `analyze`.
    Report,
}

fn parse_period(s: &str) -> Result<Period, String> {
    s.parse().map_err(|e: distwarm::Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<SuiteSelector, String> {
    s.parse().map_err(|e: distwarm::Error| e.to_string())
}

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Unusable configuration or arguments.
    Config(anyhow::Error),
    /// Input data that cannot be analyzed.
    Data(anyhow::Error),
    /// A simulation check missed its target.
    Check(String),
    /// Results could not be written.
    Output(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Output(_) => 1,
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
            Failure::Check(_) => 4,
        }
    }

    fn context(self, c: String) -> Self {
        match self {
            Failure::Config(e) => Failure::Config(e.context(c)),
            Failure::Data(e) => Failure::Data(e.context(c)),
            Failure::Output(e) => Failure::Output(e.context(c)),
            Failure::Check(m) => Failure::Check(format!("{c}: {m}")),
        }
    }

    fn report(&self) {
        match self {
            Failure::Config(e) => eprintln!("configuration error: {e:#}"),
            Failure::Data(e) => eprintln!("data error: {e:#}"),
            Failure::Output(e) => eprintln!("error: {e:#}"),
            Failure::Check(m) => eprintln!("{m}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let reps = match &cli.command {
        Command::Simulate { reps, .. } => *reps,
        _ => None,
    };
    let overrides = Overrides {
        periods: cli.periods,
        split_year: cli.split_year,
        level: cli.level,
        bandwidth: cli.bandwidth,
        seed: cli.seed,
        reps,
        out: cli.out,
    };
    let config = RunConfig::load(cli.config.as_deref(), overrides).map_err(Failure::Config)?;
    match cli.command {
        Command::Ingest => commands::ingest(&config),
        Command::Analyze => commands::analyze(&config),
        Command::Compare { a, b } => commands::compare(&config, a.as_deref(), b.as_deref()),
        Command::Simulate { suite, .. } => commands::simulate(&config, suite),
        Command::Report => commands::report(&config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            f.report();
            ExitCode::from(f.code())
        }
    }
}
