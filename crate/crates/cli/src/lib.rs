//! Command-line front end for `sbox_forge`: S-box files, JSON reports and the
//! `analyze`, `survey`, `count`, `construct` and `search` commands.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;
pub mod sbox_file;

pub use args::{Cli, Command};
pub use error::CliError;
pub use sbox_file::SboxFile;

/// Environment variable capping the worker count. Results do not depend on it.
pub const THREADS_ENV: &str = "SBOX_FORGE_THREADS";

pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Survey(a) => commands::survey(a),
        Command::Count(a) => commands::count(a),
        Command::Construct(a) => commands::construct(a),
        Command::Search(a) => commands::search(a),
    }
}

/// Sizes the global rayon pool from [`THREADS_ENV`] when it is set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let v = v.trim();
    if v.is_empty() {
        return Ok(());
    }
    let threads: usize = v
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV}={v} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}
