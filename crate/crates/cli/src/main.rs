//! Command-line experiment runner.
//!
//! Exit codes: 0 success, 1 computation or I/O error, 2 usage error.

mod commands;
mod config;
mod formats;
mod report;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use config::{FileConfig, UsageError};

#[derive(Parser)]
#[command(
    name = "topicrisk",
    version,
    about = "Missed-topic risk analysis: closed-form risk model, coverage simulation, and a topic-model/classifier/active-learning pipeline on synthetic corpora"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores). Results
    /// are identical for any value.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// JSON file supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form missed-topic risk for one scenario.
    Risk(commands::risk::Args),
    /// Shuffle-based cover-time simulation over a label matrix.
    Simulate(commands::simulate::Args),
    /// Generate synthetic corpora and label matrices.
    #[command(subcommand)]
    Synth(commands::synth::Kind),
    /// Fit a topic model and audit the dominant-topic distribution.
    Lda(commands::lda::Args),
    /// Train and evaluate a relevance classifier.
    Classify(commands::classify::Args),
    /// Run the continuous-active-learning review simulation.
    Cal(commands::cal::Args),
    /// Merge previously written reports into one document.
    Report(commands::report_cmd::Args),
}

pub struct Ctx {
    pub argv: Vec<String>,
    pub file_config: FileConfig,
    pub started: Instant,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let started = Instant::now();
    let cli = Cli::parse();

    if let Some(workers) = cli.workers {
        if workers == 0 {
            eprintln!("usage error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        // Ignore the error if a pool already exists (e.g. under tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }

    let file_config = match FileConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("usage error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let ctx = Ctx {
        argv: std::env::args().collect(),
        file_config,
        started,
    };

    let result = match cli.command {
        Command::Risk(args) => commands::risk::run(args, &ctx),
        Command::Simulate(args) => commands::simulate::run(args, &ctx),
        Command::Synth(kind) => commands::synth::run(kind, &ctx),
        Command::Lda(args) => commands::lda::run(args, &ctx),
        Command::Classify(args) => commands::classify::run(args, &ctx),
        Command::Cal(args) => commands::cal::run(args, &ctx),
        Command::Report(args) => commands::report_cmd::run(args, &ctx),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("usage error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
