use std::path::PathBuf;
use std::process::ExitCode;

use antiassoc_cli::config::{JobConfig, Overrides};
use antiassoc_cli::error::{CliError, EXIT_VERIFY};
use antiassoc_cli::{run, Command};
use clap::{Parser, Subcommand};

/// Anti-associated orthogonal polynomials: coefficients, values, measures,
/// verification reports and differential equations.
///
/// Exit status: 0 on success, 2 when a verification fails, 3 for an
/// unusable configuration.
#[derive(Debug, Parser)]
#[command(name = "antiassoc", version)]
struct Cli {
    /// TOML job configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Grid size for `eval` and `measure`.
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,
    /// Pass threshold for `eval` and for the Gram check of `verify`.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
    /// Highest degree (`coeffs`, `eval`) or `n` of `P^(-r)_{n+r}` (`ode`).
    #[arg(long, global = true, value_name = "N")]
    degree: Option<usize>,
    /// Truncation size for spectral checks.
    #[arg(long, global = true, value_name = "N")]
    truncation: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// Recurrence coefficients of the base, the extension and its shift back.
    Coeffs,
    /// Values by the closed form and the recurrence, with their mismatch.
    Eval,
    /// Density on a grid and the mass points of the extended measure.
    Measure,
    /// Verification report for the extended measure.
    Verify,
    /// Exact differential equation with residuals.
    Ode,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(3);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let command = match cli.command {
        Cmd::Coeffs => Command::Coeffs,
        Cmd::Eval => Command::Eval,
        Cmd::Measure => Command::Measure,
        Cmd::Verify => Command::Verify,
        Cmd::Ode => Command::Ode,
    };
    let overrides = Overrides {
        grid: cli.grid,
        tol: cli.tol,
        degree: cli.degree,
        truncation: cli.truncation,
    };
    let result = cli
        .config
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))
        .and_then(|path| JobConfig::from_path(&path, &overrides))
        .and_then(|config| run(command, &config, &cli.out));
    match result {
        Ok(report) => {
            println!("{}", report.summary);
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFY as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
