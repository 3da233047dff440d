mod args;
mod commands;
mod config;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};
use julia_coding::cod_space::CodError;
use julia_coding::coding_tree::CodingError;
use julia_coding::eq_graph::EqError;
use julia_coding::selftest::SelftestError;
use julia_coding::{GeomError, LiftError, MapError};

use args::Cli;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Cod(#[from] CodError),
    #[error(transparent)]
    Eq(#[from] EqError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Selftest(#[from] SelftestError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{failed} of {total} criteria failed")]
    SelftestFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Usage(_) | CliError::Clap(_) => "Usage",
            CliError::Lift(e) => e.name(),
            CliError::Cod(e) => e.name(),
            CliError::Eq(e) => e.name(),
            CliError::Coding(e) => e.name(),
            CliError::Map(e) => e.name(),
            CliError::Geom(e) => e.name(),
            CliError::Selftest(e) => e.name(),
            CliError::Io { .. } => "Io",
            CliError::SelftestFailed { .. } => "SelftestFailed",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Clap(_) => 1,
            _ => 2,
        }
    }
}

fn run(argv: Vec<String>, out: &mut dyn Write) -> Result<(), CliError> {
    let cmd = Cli::command();
    let argv = match config::config_path(&argv) {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("--config {path}: {e}")))?;
            config::merge(&cmd, &argv, &config::parse(&text)?)?
        }
        None => argv,
    };
    let matches = cmd.try_get_matches_from(argv)?;
    let cli = Cli::from_arg_matches(&matches)?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    commands::dispatch(&cli, out)
}

fn main() -> ExitCode {
    let argv: Result<Vec<String>, _> = std::env::args_os().map(|a| a.into_string()).collect();
    let Ok(argv) = argv else {
        eprintln!("error: Usage: arguments must be valid UTF-8");
        return ExitCode::from(1);
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(argv, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(e.exit_code())
        }
    }
}
