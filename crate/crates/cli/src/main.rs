use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::LevelFilter;

mod commands;
mod config;

use config::RunConfig;

/// Filterbank design, reconstruction checks and masking-based disjointness
/// evaluation.
#[derive(Debug, Parser)]
#[command(name = "fbx", version)]
struct Cli {
    /// Log progress and diagnostics to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    /// Write the parameters of this run as JSON for `fbx replay`.
    #[arg(long, global = true, value_name = "PATH")]
    save_config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    #[command(flatten)]
    Run(RunConfig),
    /// Re-run a command from a saved configuration.
    Replay {
        config: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(1),
            CliError::Runtime(_) => ExitCode::from(2),
        }
    }
}

impl From<fbx_core::Error> for CliError {
    fn from(e: fbx_core::Error) -> Self {
        use fbx_core::Error::*;
        match e {
            InvalidArgument(_) | InvalidLength(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn init_logging(verbose: bool) {
    let level = if verbose { LevelFilter::Info } else { LevelFilter::Warn };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .format_timestamp(None)
        .init();
}

fn run(cli: Cli) -> CliResult<()> {
    let config = match cli.command {
        Command::Run(config) => config,
        Command::Replay { config } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", config.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("invalid run configuration: {e}")))?
        }
    };
    if let Some(path) = &cli.save_config {
        let mut json = serde_json::to_string_pretty(&config)?;
        json.push('\n');
        fs::write(path, json)?;
    }
    commands::execute(&config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    init_logging(cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
