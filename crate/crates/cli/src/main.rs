//! `pest-engine`: runs policy queries, simulations, sweeps and timing
//! studies from a JSON configuration.
//!
//! Exit codes: 0 success, 1 unexpected failure, 2 configuration or usage
//! error, 3 I/O failure, 4 integration step too large.

mod args;
mod commands;
mod error;
mod output;
mod run_config;

use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use crate::args::Cli;
use crate::error::{exit_code, Failure};

const THREADS_ENV: &str = "PEST_ENGINE_THREADS";

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Setting(format!("{THREADS_ENV} must be a nonnegative integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("starting worker pool")
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    configure_threads()?;
    commands::dispatch(&cli.command, &cli.global)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
