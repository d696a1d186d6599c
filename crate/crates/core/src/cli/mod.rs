//! Command-line interface.
//!
//! `run` executes one invocation in process and returns its exit code:
//! 0 on success, 1 on a numerical failure (singularity or a failed
//! verification), 2 on usage or input errors.

pub mod format;
mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::error::MilacError;
pub use format::{LoadError, ParseError};

/// Default tolerance for verification commands.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Environment variable overriding [`DEFAULT_TOL`].
pub const TOL_ENV: &str = "MILAC_TOL";

#[derive(Debug, Parser)]
#[command(name = "milac", version, about = "Microwave linear analog computer simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Digital,
    Analog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OpArg {
    Lmmse,
    Invert,
    Kalman,
}

#[derive(Debug, Clone, Args)]
pub struct ModelFiles {
    /// Observation matrix H (Y x X)
    #[arg(long)]
    pub h: PathBuf,
    /// Prior covariance Cx (X x X)
    #[arg(long)]
    pub cx: PathBuf,
    /// Noise covariance Cn (Y x Y)
    #[arg(long)]
    pub cn: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Port voltages of a network given its component grid
    Simulate {
        /// Component grid (P x P)
        #[arg(long)]
        network: PathBuf,
        #[arg(long, default_value_t = crate::network::DEFAULT_Y0)]
        y0: f64,
        /// Number of driven ports
        #[arg(long)]
        n: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cost: bool,
    },
    /// LMMSE estimate of x from y
    Lmmse {
        #[command(flatten)]
        model: ModelFiles,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Digital)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = SignArg::Plus)]
        sign: SignArg,
        /// Closed form for digital mode
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        form: u8,
        #[arg(long, default_value_t = crate::network::DEFAULT_Y0)]
        y0: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cost: bool,
    },
    /// LMMSE error covariance
    Cov {
        #[command(flatten)]
        model: ModelFiles,
        #[arg(long, value_enum, default_value_t = Mode::Digital)]
        mode: Mode,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        form: u8,
        #[arg(long, default_value_t = crate::network::DEFAULT_Y0)]
        y0: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cost: bool,
    },
    /// Matrix inverse
    Invert {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Digital)]
        mode: Mode,
        #[arg(long, default_value_t = crate::network::DEFAULT_Y0)]
        y0: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cost: bool,
    },
    /// Kalman filter over a directory of observations
    Kalman {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        h: PathBuf,
        /// State noise covariance
        #[arg(long)]
        m: PathBuf,
        /// Observation noise covariance
        #[arg(long)]
        ncov: PathBuf,
        #[arg(long)]
        x0: PathBuf,
        #[arg(long)]
        r0: PathBuf,
        /// Directory holding obs_0001.cvec, obs_0002.cvec, ...
        #[arg(long)]
        obs: PathBuf,
        /// Number of steps; defaults to every observation file present
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Digital)]
        mode: Mode,
        #[arg(long, default_value_t = crate::network::DEFAULT_Y0)]
        y0: f64,
        /// Output directory for xhat_NNNN.cvec and r_NNNN.cmx
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cost: bool,
    },
    /// Check the lossless realization of a network against the original
    LosslessVerify {
        /// Admittance matrix (P x P)
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = crate::network::DEFAULT_Y0)]
        y0: f64,
        #[arg(long)]
        input: PathBuf,
        /// Relative tolerance; defaults to MILAC_TOL or 1e-9
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Operation-count table for square sizes
    Complexity {
        #[arg(long, value_enum)]
        op: OpArg,
        /// start:stop:xK or start:stop:+K
        #[arg(long, default_value = "16:8192:x2")]
        sizes: String,
        /// CSV destination; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure of a CLI invocation.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Numerical(#[from] MilacError),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(e) if e.is_singular() => 1,
            CliError::Verification(_) => 1,
            _ => 2,
        }
    }
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match run::execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
