//! `lamptf`: command-line front end.
//!
//! Exit codes: 0 success, 1 reproduction failure, 2 numeric failure,
//! 64 usage error.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

pub const EXIT_REPRODUCE: u8 = 1;
pub const EXIT_NUMERIC: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "lamptf",
    version,
    about = "Thomas-Fermi family: shooting, Abel reduction, phase plane"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Embedding {
    /// `n = 1 + p/(p+1)`, `λ = 2`: the self-adjoint form reached by `z = x y(1/x)`.
    Chain,
    /// The family's own Emden-Fowler exponents `n = 2 - 1/(p+1)`, `λ = 3 - 2/(p+1)`.
    EmdenFowler,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Lampariello parameter (p = 1 is Thomas-Fermi).
    #[arg(long = "p", global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub p: f64,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file. For `solve` and `phase` this is a stem: both companion
    /// files are written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub rtol: f64,
    #[arg(long, global = true, default_value_t = 1e-14)]
    pub atol: f64,
    /// Width of the final slope bracket (>= 1e-12).
    #[arg(long = "slope-tol", global = true, default_value_t = 1e-10)]
    pub slope_tol: f64,
    /// Truncation of the far boundary.
    #[arg(long = "x-max", global = true, default_value_t = 50.0)]
    pub x_max: f64,
    /// Phase-plane window: X0 X1 Y0 Y1.
    #[arg(long, global = true, num_args = 4, value_names = ["X0", "X1", "Y0", "Y1"], allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,
    /// Machine-readable report (reproduce).
    #[arg(long, global = true)]
    pub json: bool,
    /// Injects a wrong particular-solution amplitude (negative control).
    #[arg(long = "inject-kp", global = true, hide = true)]
    pub inject_kp: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the boundary-value problem by shooting on the initial slope.
    Solve,
    /// Particular solution, oscillator coefficients and perturbation expansion.
    Perturb,
    /// Abel invariant and the integrability test.
    Abel,
    /// Majorana reduction along the solved curve.
    Majorana,
    /// Phase portrait of the planar system (SVG plus fixed-point CSV).
    Phase {
        #[arg(long, value_enum, default_value_t = Embedding::EmdenFowler)]
        embedding: Embedding,
        /// Integration time each way from every seed.
        #[arg(long = "t-span", default_value_t = 4.0)]
        t_span: f64,
    },
    /// Classify the equilibria, or a given Jacobian.
    Classify {
        #[arg(long, value_enum, default_value_t = Embedding::EmdenFowler)]
        embedding: Embedding,
        /// Row-major 2x2 matrix: A B C D.
        #[arg(long, num_args = 4, value_names = ["A", "B", "C", "D"], allow_negative_numbers = true)]
        matrix: Option<Vec<f64>>,
    },
    /// Run the reproduction checks.
    Reproduce,
}

/// A failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(lamptf::Error),
    Io(String),
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("LAMPTF_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("LAMPTF_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|()| commands::run(&cli));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numeric(err)) => {
            let diag = serde_json::json!({ "error": err.to_string(), "exit_code": EXIT_NUMERIC });
            let _ = writeln!(
                std::io::stdout(),
                "{}",
                serde_json::to_string_pretty(&diag).unwrap_or_default()
            );
            eprintln!("error: {err}");
            ExitCode::from(EXIT_NUMERIC)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn global_flags_parse_after_subcommand() {
        let cli = Cli::try_parse_from(["lamptf", "phase", "--p", "2", "--window", "-6", "2", "-5", "4"]).unwrap();
        assert_eq!(cli.global.p, 2.0);
        assert_eq!(cli.global.window, Some(vec![-6.0, 2.0, -5.0, 4.0]));
        assert!(matches!(
            cli.command,
            Command::Phase {
                embedding: Embedding::EmdenFowler,
                ..
            }
        ));
    }
}
