//! `revise`: mine review rounds, build datasets and evaluate predictions.

mod commands;
mod config;
mod error;
mod lock;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::PipelineConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "revise", version, about = "Learn code changes recommended by reviewers")]
struct Cli {
    /// Pipeline configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Serve review-host requests from recorded responses under PATH
    /// (PATH/gerrit and PATH/github when present) instead of the network.
    #[arg(long, global = true, value_name = "PATH")]
    fixture_dir: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fetch review rounds of the configured sources into the round archive.
    Mine,
    /// Compute the idiom list from the methods in the round archive.
    ComputeIdioms,
    /// Link comments to methods and label them with the relevance rules.
    FilterComments,
    /// Build the triplet and pair datasets from the round archive.
    BuildDataset,
    /// Decode the test split with the copy baseline.
    DecodeBaseline,
    /// Score predictions against the test split.
    Evaluate {
        /// Name recorded in the report.
        #[arg(long, default_value = "copy-baseline")]
        model: String,
        /// Directory holding beam_<k>.tsv prediction files.
        #[arg(long, value_name = "DIR")]
        predictions: Option<PathBuf>,
    },
    /// Render all evaluation records as one table.
    Report,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path).map_err(CliError::Config)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.paths.out = out.clone();
    }
    let errors = config.validate();
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(CliError::Config(errors))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = load_config(&cli)?;
    let _lock = lock::OutputLock::acquire(&config.paths.out)?;
    match cli.command {
        Command::Mine => commands::mine(&config, cli.fixture_dir.as_deref()),
        Command::ComputeIdioms => commands::compute_idioms(&config),
        Command::FilterComments => commands::filter_comments(&config),
        Command::BuildDataset => commands::build_dataset(&config),
        Command::DecodeBaseline => commands::decode_baseline(&config),
        Command::Evaluate { model, predictions } => commands::evaluate(&config, &model, predictions.as_deref()),
        Command::Report => commands::report(&config),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
