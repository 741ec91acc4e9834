//! Command-line front end for `hypospec`.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => exit::VALIDATION,
            Self::Solver(_) => exit::SOLVER,
            Self::Io(_) => 1,
        }
    }
}

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VALIDATION: i32 = 2;
    pub const SOLVER: i32 = 3;
    pub const BOUND_FAILURE: i32 = 4;
    pub const LEMMA_VIOLATION: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "hypospec", version, about = "Eigenvalue bounds for Greiner-type sub-Laplacians")]
pub struct Cli {
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find characteristic boundary points of a domain.
    Classify(ClassifyArgs),
    /// Smallest Dirichlet eigenvalues of the discretized operator.
    Solve(SolveArgs),
    /// Evaluate the eigenvalue inequalities on a spectrum.
    Verify(VerifyArgs),
    /// Test whether a power couple satisfies the couple condition.
    CoupleCheck(CoupleArgs),
    /// Randomized trials of the elementary sum inequalities.
    LemmaTest(LemmaArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct DomainArgs {
    /// torus | greiner-ball | box
    #[arg(long)]
    pub domain: Option<String>,
    /// Torus core radius.
    #[arg(long)]
    pub a: Option<f64>,
    /// Torus centre height.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Torus tube radius.
    #[arg(long)]
    pub m: Option<f64>,
    /// Ball radius.
    #[arg(long)]
    pub r: Option<f64>,
    /// Half-width of the centred cube for `box`.
    #[arg(long)]
    pub half: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub sigma: Option<u32>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    /// Uniform grid spacing.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub hx: Option<f64>,
    #[arg(long)]
    pub hy: Option<f64>,
    #[arg(long)]
    pub ht: Option<f64>,
    /// Bounding box `xlo,xhi,ylo,yhi,tlo,thi`.
    #[arg(long, allow_hyphen_values = true)]
    pub bbox: Option<String>,
    /// greiner | euclidean
    #[arg(long)]
    pub mode: Option<String>,
    /// Relative residual target.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// auto | dense | lobpcg | lanczos
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Boundary samples.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub json: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub k: Option<usize>,
    /// Spectrum CSV path (stdout when absent).
    #[arg(long)]
    pub output: Option<String>,
    #[arg(long)]
    pub json: Option<String>,
    /// MatrixMarket export of the assembled operator.
    #[arg(long = "export-matrix")]
    pub export_matrix: Option<String>,
    /// Report the spectrum of the squared operator instead.
    #[arg(long)]
    pub proxy: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Spectrum CSV; a fresh solve is run when absent.
    #[arg(long)]
    pub spectrum: Option<String>,
    /// dirichlet | clamped | both
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Label rows from a spectrum file as coming from the squared-operator proxy.
    #[arg(long)]
    pub proxy: bool,
    #[arg(long = "tol-dirichlet")]
    pub tol_dirichlet: Option<f64>,
    #[arg(long = "tol-clamped")]
    pub tol_clamped: Option<f64>,
    /// Couples for the commutator rows, `alpha:beta` separated by commas.
    #[arg(long)]
    pub couples: Option<String>,
    /// Skip the commutator rows of a fresh solve.
    #[arg(long = "no-commutator")]
    pub no_commutator: bool,
    #[arg(long)]
    pub output: Option<String>,
    #[arg(long)]
    pub json: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CoupleArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Skip the necessary-condition shortcut and always scan the grid.
    #[arg(long = "no-gate")]
    pub no_gate: bool,
    #[arg(long)]
    pub json: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct LemmaArgs {
    #[arg(long)]
    pub trials: Option<usize>,
    /// all | power-mean | chebyshev | generalized-chebyshev
    #[arg(long)]
    pub suite: Option<String>,
    /// Fixed power-mean exponent.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub json: Option<String>,
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = config::Settings::load(cli.config.as_deref()).and_then(|settings| {
        match &cli.command {
            Command::Classify(a) => commands::classify(&settings, a),
            Command::Solve(a) => commands::solve(&settings, a),
            Command::Verify(a) => commands::verify(&settings, a),
            Command::CoupleCheck(a) => commands::couple_check(&settings, a),
            Command::LemmaTest(a) => commands::lemma_test(&settings, a),
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
