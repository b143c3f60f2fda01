//! The `revisp` benchmark command line as a library.
//!
//! [`run`] parses arguments and executes one subcommand, returning the text
//! it would print. Errors carry their process exit code.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::ffi::OsString;

use clap::Parser;

pub use args::Cli;
pub use error::{CliError, CliResult};

pub fn execute(cli: Cli) -> CliResult<String> {
    let cfg = match &cli.config {
        Some(path) => config::Config::load(path)?,
        None => config::Config::default(),
    };
    let threads = cli.threads.or(cfg.threads).unwrap_or(0);
    let ctx = commands::Context {
        seed: cli.seed.or(cfg.seed).unwrap_or(0),
        manifest: cli.manifest.clone().or_else(|| cfg.manifest.clone()),
        config: cfg,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| commands::dispatch(&ctx, &cli.command))
}

/// Parses `args` (program name first) and executes the command.
pub fn run<I, T>(args: I) -> CliResult<String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    execute(cli)
}
