//! `robinpart` command-line driver.

mod commands;
mod failure;
mod manifest;
mod values;

use clap::{Parser, Subcommand};
use commands::{cheeger, eig, honeycomb, optimize, verify};
use failure::Failure;
use std::process::ExitCode;

const THREADS_VAR: &str = "ROBINPART_THREADS";

#[derive(Parser, Debug)]
#[command(name = "robinpart", version, about = "Robin eigenvalues and optimal multiphase partitions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    Eig(eig::EigArgs),
    Optimize(optimize::OptimizeArgs),
    Verify(verify::VerifyArgs),
    Honeycomb(honeycomb::HoneycombArgs),
    Cheeger(cheeger::CheegerArgs),
}

fn init_threads() -> Result<(), Failure> {
    let Ok(text) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .map_err(|_| Failure::invalid(THREADS_VAR, format!("expected a thread count, got `{text}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::invalid(THREADS_VAR, e.to_string()))
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    init_threads()?;
    match &cli.command {
        Command::Eig(a) => eig::run(a),
        Command::Optimize(a) => optimize::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Honeycomb(a) => honeycomb::run(a),
        Command::Cheeger(a) => cheeger::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let failure = Failure::config("InvalidArguments", e.to_string().trim().to_string());
            eprintln!("{}", failure.to_json());
            return ExitCode::from(failure.exit_code());
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.to_json());
            ExitCode::from(failure.exit_code())
        }
    }
}
