//! Command-line driver: spectra, localization bounds, sign-property checks,
//! quadrature measures, eigenvalue trajectories, Gram degeneracy, and the
//! full verification suite.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage error,
//! 3 numerical failure. Errors are reported as one-line JSON on standard
//! error. Reports go to standard output (or `--output`) and are
//! byte-identical across reruns of the same configuration.

mod reports;
mod verify;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gribov_lab::textfmt;
use gribov_lab::Error;

use reports::{CliError, Outcome};

const EXIT_OK: i32 = 0;
const EXIT_CHECK_FAILED: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_NUMERICAL: i32 = 3;

/// Worker-count environment variable; jobs never fan out wider than this.
const THREADS_VAR: &str = "GRIBOV_LAB_THREADS";

#[derive(Parser)]
#[command(
    name = "gribov-lab",
    version,
    about = "Spectral toolkit for complex-symmetric Jacobi matrices",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MethodArg {
    /// Dense QR on the matrix.
    Dense,
    /// Aberth–Ehrlich on the characteristic polynomial.
    Aberth,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ConstructionArg {
    /// Squares of the bilinearly normalized eigenvector leading components.
    EigenvectorSquares,
    /// Solve the moment system Σ w·P_i = δ_{i,1}.
    MomentSolve,
}

#[derive(Args)]
struct Common {
    /// Family spec: gribov:mu=1+0.5i,lambda=0.2 | laguerre:alpha=-6 |
    /// ultraspherical:lambda=-10 | jacobi:alpha=-9,beta=-9
    #[arg(long, default_value = "gribov:mu=1,lambda=0.1")]
    family: String,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this path instead of standard output.
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of the n-th truncation (one size or a size sweep).
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Truncation size (exactly one of --n / --n-range).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), conflicts_with = "n_range")]
        n: Option<u64>,
        /// Inclusive size sweep lo:hi; independent sizes fan out across
        /// at most GRIBOV_LAB_THREADS workers, assembled in input order.
        #[arg(long, value_parser = parse_range)]
        n_range: Option<(usize, usize)>,
        /// Spectral route.
        #[arg(long, value_enum, default_value_t = MethodArg::Dense)]
        method: MethodArg,
        /// Solver tolerance override (> 0).
        #[arg(long, value_parser = parse_positive)]
        tol: Option<f64>,
    },
    /// Localization box of the truncation, with the spectrum checked
    /// against it.
    Bounds {
        #[command(flatten)]
        common: Common,
        /// Truncation size.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Box inflation used for the containment check (> 0).
        #[arg(long, default_value_t = 1e-9, value_parser = parse_positive)]
        slack: f64,
    },
    /// Sign properties of the real-coefficient polynomial sequence and the
    /// smallest odd-degree zero ladder (real gribov parameters, mu > 0).
    Properties {
        #[command(flatten)]
        common: Common,
        /// Largest polynomial degree checked.
        #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(2..))]
        n_max: u64,
        /// Lower end of the sampling grid.
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        grid_lo: f64,
        /// Upper end of the sampling grid.
        #[arg(long, default_value_t = 18.0, allow_hyphen_values = true)]
        grid_hi: f64,
        /// Number of grid samples.
        #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u64).range(2..))]
        grid_points: u64,
        /// Ladder length: follows x_3, x_5, …, x_{2k+1} for k up to this.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        k_max: u64,
    },
    /// Discrete quadrature measure on the truncation's eigenvalues, with
    /// its orthonormality defect.
    Quadrature {
        #[command(flatten)]
        common: Common,
        /// Truncation size (number of nodes).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Weight construction.
        #[arg(long, value_enum, default_value_t = ConstructionArg::EigenvectorSquares)]
        construction: ConstructionArg,
        /// Defect degree M (1 ≤ M ≤ N); defaults to N.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: Option<u64>,
    },
    /// Follow one eigenvalue across truncation sizes toward its target.
    Trajectory {
        #[command(flatten)]
        common: Common,
        /// 1-based eigenvalue index (by real part at the first size).
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        /// Inclusive truncation range lo:hi.
        #[arg(long, value_parser = parse_range)]
        n_range: (usize, usize),
        /// Solver tolerance override (> 0).
        #[arg(long, value_parser = parse_positive)]
        tol: Option<f64>,
    },
    /// Gram determinants of the joint forward/adjoint Krylov chains.
    Gram {
        #[command(flatten)]
        common: Common,
        /// Truncation size.
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        /// Largest chain order (needs order + 1 ≤ n); defaults to
        /// min(8, n − 1).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        order: Option<u64>,
    },
    /// Run every verification suite at one configuration and report a
    /// pass/fail table. Exits 1 when any applicable suite fails.
    VerifyAll {
        #[command(flatten)]
        common: Common,
        /// Truncation size.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
    let lo: usize = lo.trim().parse().map_err(|_| format!("bad range start '{lo}'"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("bad range end '{hi}'"))?;
    if lo < 1 {
        return Err("range must start at 1 or later".into());
    }
    if lo > hi {
        return Err(format!("range start {lo} exceeds end {hi}"));
    }
    Ok((lo, hi))
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("bad number '{s}'"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("tolerance must be a positive finite number, got {s}"))
    }
}

/// Worker cap from the environment; absent means 1 (fully deterministic
/// scheduling, though report bytes never depend on the worker count).
fn read_threads() -> Result<usize, String> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(1),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(t),
            _ => Err(format!("{THREADS_VAR} must be a positive integer, got '{raw}'")),
        },
    }
}

fn error_json(kind: &str, code: i32, message: &str) -> String {
    format!(
        "{{\"error\":{{\"kind\":{},\"exit\":{},\"message\":{}}}}}",
        textfmt::fmt_str(kind),
        code,
        textfmt::fmt_str(message)
    )
}

fn emit_error(kind: &str, code: i32, message: &str) -> i32 {
    eprintln!("{}", error_json(kind, code, message));
    code
}

/// Library errors split into domain problems (the request is outside what
/// the mathematics defines — usage) and honest numerical failures.
fn lib_error(e: &Error) -> (&'static str, i32) {
    match e {
        Error::InvalidParameter(_) => ("invalid_parameter", EXIT_USAGE),
        Error::SizeExceeded(_) => ("size_exceeded", EXIT_USAGE),
        Error::ShapeMismatch(_) => ("shape_mismatch", EXIT_USAGE),
        Error::HypothesisViolated(_) => ("hypothesis_violated", EXIT_USAGE),
        Error::NotAnEigenpair(_) => ("not_an_eigenpair", EXIT_NUMERICAL),
        Error::NoConvergence(_) => ("no_convergence", EXIT_NUMERICAL),
        Error::DegenerateSpectrum(_) => ("degenerate_spectrum", EXIT_NUMERICAL),
        Error::QuasiNullVector(_) => ("quasi_null_vector", EXIT_NUMERICAL),
        Error::SingularMomentSystem(_) => ("singular_moment_system", EXIT_NUMERICAL),
        Error::NoRealZero(_) => ("no_real_zero", EXIT_NUMERICAL),
        Error::TrackingLost(_) => ("tracking_lost", EXIT_NUMERICAL),
    }
}

fn dispatch(cmd: Command, threads: usize) -> Result<(Outcome, Common), CliError> {
    match cmd {
        Command::Spectrum { common, n, n_range, method, tol } => {
            let (sizes, sweep): (Vec<usize>, bool) = match (n, n_range) {
                (Some(n), None) => (vec![n as usize], false),
                (None, Some((lo, hi))) => ((lo..=hi).collect(), true),
                (None, None) => {
                    return Err(CliError::Usage(
                        "spectrum needs exactly one of --n / --n-range".into(),
                    ))
                }
                (Some(_), Some(_)) => unreachable!("clap rejects the conflict"),
            };
            let out =
                reports::spectrum(&common.family, &sizes, sweep, method, tol, common.format, threads)?;
            Ok((out, common))
        }
        Command::Bounds { common, n, slack } => {
            let out = reports::bounds(&common.family, n as usize, slack, common.format)?;
            Ok((out, common))
        }
        Command::Properties { common, n_max, grid_lo, grid_hi, grid_points, k_max } => {
            let out = reports::properties(
                &common.family,
                n_max as usize,
                grid_lo,
                grid_hi,
                grid_points as usize,
                k_max as usize,
                common.format,
            )?;
            Ok((out, common))
        }
        Command::Quadrature { common, n, construction, m } => {
            let out = reports::quadrature(
                &common.family,
                n as usize,
                construction,
                m.map(|m| m as usize),
                common.format,
            )?;
            Ok((out, common))
        }
        Command::Trajectory { common, k, n_range, tol } => {
            let out =
                reports::trajectory(&common.family, k as usize, n_range, tol, common.format)?;
            Ok((out, common))
        }
        Command::Gram { common, n, order } => {
            let out = reports::gram(
                &common.family,
                n as usize,
                order.map(|o| o as usize),
                common.format,
            )?;
            Ok((out, common))
        }
        Command::VerifyAll { common, n } => {
            let out = verify::verify_all(&common.family, n as usize, common.format)?;
            Ok((out, common))
        }
    }
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            return emit_error("usage", EXIT_USAGE, &e.to_string());
        }
    };
    let threads = match read_threads() {
        Ok(t) => t,
        Err(msg) => return emit_error("usage", EXIT_USAGE, &msg),
    };
    match dispatch(cli.command, threads) {
        Ok((outcome, common)) => {
            let mut body = outcome.body;
            if !body.ends_with('\n') {
                body.push('\n');
            }
            match common.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, &body) {
                        return emit_error(
                            "io",
                            EXIT_NUMERICAL,
                            &format!("cannot write {}: {e}", path.display()),
                        );
                    }
                }
                None => print!("{body}"),
            }
            if outcome.ok {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(CliError::Usage(msg)) => emit_error("usage", EXIT_USAGE, &msg),
        Err(CliError::Lib(e)) => {
            let (kind, code) = lib_error(&e);
            emit_error(kind, code, &e.to_string())
        }
    }
}

fn main() {
    std::process::exit(real_main());
}
