//! The `symspec` command-line tool.
//!
//! Every decomposition subcommand reads a matrix file, writes a JSON report
//! and exits with
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | ok |
//! | 1 | I/O, parse or usage error (no report) |
//! | 2 | input rejected by a precondition (report with `status: rejected`) |
//! | 3 | `verify`: the report does not check out |
//!
//! [`run`] is the whole program with its streams passed in, so tests can
//! drive it in process.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use symspec::random::{random_normal, random_skew, random_spd};
use symspec::williamson::random_symplectic;

pub mod json;
pub mod matfile;
pub mod report;
pub mod truncation;
pub mod verify;

// Guide chapters whose listings need this crate.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/truncation.md")]
    pub mod truncation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}

use report::{Kind, Method, Options, Report};
use truncation::{run_study, Family};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_REJECTED: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

/// Default precondition tolerance of every subcommand.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("malformed report: {0}")]
    Report(String),
    #[error("{0}")]
    Usage(String),
}

#[derive(Parser, Debug)]
#[command(name = "symspec", version, about = "Symplectic and normal-form decompositions of dense matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Precondition tolerance passed to the library routine.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed for the starting vector of the cyclic methods.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Eigen,
    Cyclic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    ThermalDiag,
    CoupledChain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Generator {
    Spd,
    Skew,
    Normal,
    Symplectic,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Williamson normal form of a positive definite 2n×2n matrix.
    Williamson {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Symplectic spectrum, cross-checked against the BᵀB oracle.
    SymplecticSpectrum {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Canonical form of a skew-symmetric matrix.
    Skew {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Eigen)]
        method: MethodArg,
        #[command(flatten)]
        common: Common,
    },
    /// Real block form of a normal matrix.
    NormalForm {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Spectral atoms (λ, E₁, E₂) of a normal matrix.
    SpectralPair {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Symmetric orthogonal U with U·A·Uᵀ = Aᵀ for a normal matrix.
    TransposeEquiv {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Eigen)]
        method: MethodArg,
        #[command(flatten)]
        common: Common,
    },
    /// Recompute every residual of a report.
    Verify { report: PathBuf },
    /// Symplectic spectra of growing finite sections.
    TruncationStudy {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// Coupling strength (coupled-chain only).
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        /// Strictly increasing mode counts, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16, 32])]
        sizes: Vec<usize>,
        /// Number of leading values compared between consecutive sizes.
        #[arg(long, default_value_t = 3)]
        top_m: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Write a seeded random test matrix in the matrix-file format.
    Generate {
        #[arg(value_enum)]
        what: Generator,
        /// Dimension (half-dimension for `symplectic`).
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out_path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out_path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io {
            path: p.display().to_string(),
            source: e,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io {
            path: "<stdout>".into(),
            source: e,
        }),
    }
}

fn json_only(common: &Common) -> Result<(), CliError> {
    if common.format == Format::Csv {
        return Err(CliError::Usage("csv output is only available for truncation-study".into()));
    }
    Ok(())
}

fn method(m: MethodArg) -> Method {
    match m {
        MethodArg::Eigen => Method::Eigen,
        MethodArg::Cyclic => Method::Cyclic,
    }
}

fn decompose(kind: Kind, input: &Path, m: Method, common: &Common, stdout: &mut dyn Write) -> Result<i32, CliError> {
    json_only(common)?;
    let a = matfile::read_matrix(input)?;
    let opts = Options {
        tol: common.tol,
        method: m,
        seed: common.seed,
    };
    let report = Report::run(kind, a, opts);
    emit(&report.render(), common.out.as_deref(), stdout)?;
    Ok(if report.is_ok() { EXIT_OK } else { EXIT_REJECTED })
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Williamson { input, common } => decompose(Kind::Williamson, &input, Method::Eigen, &common, stdout),
        Command::SymplecticSpectrum { input, common } => {
            decompose(Kind::SymplecticSpectrum, &input, Method::Eigen, &common, stdout)
        }
        Command::Skew { input, method: m, common } => decompose(Kind::Skew, &input, method(m), &common, stdout),
        Command::NormalForm { input, common } => decompose(Kind::NormalForm, &input, Method::Eigen, &common, stdout),
        Command::SpectralPair { input, common } => {
            decompose(Kind::SpectralPair, &input, Method::Eigen, &common, stdout)
        }
        Command::TransposeEquiv { input, method: m, common } => {
            decompose(Kind::TransposeEquiv, &input, method(m), &common, stdout)
        }
        Command::Verify { report } => {
            let text = std::fs::read_to_string(&report).map_err(|e| CliError::Io {
                path: report.display().to_string(),
                source: e,
            })?;
            let v = verify::verify_str(&text)?;
            emit(&v.summary(), None, stdout)?;
            Ok(if v.passed() { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::TruncationStudy {
            family,
            c,
            alpha,
            epsilon,
            sizes,
            top_m,
            common,
        } => {
            if c <= 0.0 || alpha <= 0.0 {
                return Err(CliError::Usage("--c and --alpha must be positive".into()));
            }
            let fam = match family {
                FamilyArg::ThermalDiag => Family::ThermalDiag { c, alpha },
                FamilyArg::CoupledChain => Family::CoupledChain { c, alpha, epsilon },
            };
            let study = run_study(fam, &sizes, top_m, common.tol).map_err(CliError::Usage)?;
            let text = match common.format {
                Format::Json => study.to_json().render(),
                Format::Csv => study.to_csv(),
            };
            emit(&text, common.out.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Generate { what, n, seed, out } => {
            if n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            let m = match what {
                Generator::Spd => random_spd(n, seed),
                Generator::Skew => random_skew(n, seed),
                Generator::Normal => random_normal(n, seed).matrix,
                Generator::Symplectic => random_symplectic(n, seed),
            };
            emit(&matfile::serialize(&m), out.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}
