//! Front end for the `antiassoc` library: reads a job config, runs one
//! command and writes CSV/JSON artifacts.

pub mod commands;
pub mod config;
pub mod error;
pub mod model_file;

use std::path::Path;

use commands::Report;
use config::JobConfig;
use error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Coeffs,
    Eval,
    Measure,
    Verify,
    Ode,
}

/// Runs `command`, creating `out` if needed.
pub fn run(command: Command, config: &JobConfig, out: &Path) -> Result<Report, CliError> {
    std::fs::create_dir_all(out)?;
    match command {
        Command::Coeffs => commands::cmd_coeffs(config, out),
        Command::Eval => commands::cmd_eval(config, out),
        Command::Measure => commands::cmd_measure(config, out),
        Command::Verify => commands::cmd_verify(config, out),
        Command::Ode => commands::cmd_ode(config, out),
    }
}
