mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flsm_core::pipeline::{write_errors, ErrorEntry, RunConfig};

/// Order-disbalance memory analysis of LOBSTER limit order books.
#[derive(Parser, Debug)]
#[command(name = "flsm", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// JSON run configuration; flags below override its fields.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Comma-separated tickers (default: every ticker in the config).
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',')]
    pub tickers: Option<Vec<String>>,

    /// Master seed for the increment shuffles.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    /// With run-all: stop after this stage, keeping its intermediates on disk.
    #[arg(long, global = true, value_name = "NAME")]
    pub stage: Option<Stage>,

    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Transform,
    Estimate,
    Report,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    Gaussian,
    Stable,
    Pareto,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Treat {
    Path,
    Increments,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse LOBSTER files into daily disbalance series (`<out>/days`).
    Ingest,
    /// Shuffle, bound and revert the joined increments (`<out>/series`).
    Transform,
    /// Generate synthetic series: one ad-hoc path with --law, otherwise the
    /// config's synthetic stocks as daily series.
    #[command(allow_negative_numbers = true)]
    Generate {
        #[arg(long)]
        law: Option<Law>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 3.0)]
        nu: f64,
        #[arg(long, default_value_t = 0.0)]
        d: f64,
        #[arg(long, default_value_t = 1 << 17)]
        length: usize,
        /// Label used in the output file name.
        #[arg(long, default_value = "synthetic")]
        name: String,
    },
    /// Run every estimator. With --input, fit a single series file instead of
    /// the staged stocks.
    Estimate {
        #[arg(long)]
        input: Option<PathBuf>,
        /// How to read --input (default: from its recorded kind).
        #[arg(long = "as")]
        treat: Option<Treat>,
    },
    /// Burst-duration fits. With --input, analyse one series file.
    Burst {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Threshold multipliers of σ (default: the config's).
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<f64>>,
    },
    /// Collect per-stock report JSONs in the output directory into tables.
    Report,
    /// The whole pipeline in one go.
    RunAll,
}

/// Final status of a command.
pub struct Outcome {
    pub errors: Vec<ErrorEntry>,
    /// Errors that prevented whole outputs (as opposed to single cells).
    pub fatal: bool,
}

impl Outcome {
    pub fn ok() -> Self {
        Outcome {
            errors: Vec::new(),
            fatal: false,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let config = commands::load_config(&cli.global);
    let out_dir = match &config {
        Ok(c) => c.out_dir.clone(),
        Err(_) => cli
            .global
            .out
            .clone()
            .unwrap_or_else(|| RunConfig::default().out_dir),
    };
    let result = config.and_then(|c| commands::dispatch(&cli.command, &cli.global, &c));
    let outcome = match result {
        Ok(o) => o,
        Err(e) => Outcome {
            errors: vec![ErrorEntry {
                ticker: None,
                cell: None,
                message: commands::describe(&e),
            }],
            fatal: true,
        },
    };
    for e in &outcome.errors {
        let cell = e
            .cell
            .as_deref()
            .map(|c| format!(" [{c}]"))
            .unwrap_or_default();
        eprintln!(
            "error: {}{cell}: {}",
            e.ticker.as_deref().unwrap_or("-"),
            e.message
        );
    }
    let manifest = out_dir.join("errors.json");
    if let Err(e) = write_errors(&manifest, &outcome.errors) {
        eprintln!("error: cannot write error manifest: {e}");
        return ExitCode::from(1);
    }
    if outcome.fatal {
        ExitCode::from(1)
    } else if outcome.errors.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
