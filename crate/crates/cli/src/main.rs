//! `optchoice` — batch experiments for the optimal-choice problem.
//!
//! Exit codes: 0 success, 2 usage/config error, 3 data error, 4
//! runtime/resource error. The OPTCHOICE_THREADS environment variable pins
//! the parallelism level; unset means the library default.

use std::process::ExitCode;

use clap::Parser;

use optchoice_cli::commands;
use optchoice_cli::error::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "optchoice",
    version,
    about = "Pick the prime of each lot: generate data, fit scorers, evaluate"
)]
struct Cli {
    #[command(subcommand)]
    command: commands::Command,
}

fn configure_threads() -> CliResult<()> {
    let Some(raw) = std::env::var_os("OPTCHOICE_THREADS") else {
        return Ok(());
    };
    let parsed = raw
        .to_str()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|n| *n >= 1)
        .ok_or_else(|| {
            CliError::usage(format!(
                "OPTCHOICE_THREADS must be an integer >= 1, found {raw:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(parsed)
        .build_global()
        .map_err(|e| CliError::runtime(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
