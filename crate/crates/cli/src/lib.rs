//! Command-line front end: config ingestion, dispatch and output.
//!
//! Exit codes: 0 when every claim is verified, 1 when any is falsified, 2
//! when any is inconclusive, 3 on configuration or usage errors.

pub mod commands;
pub mod config;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monadforge_core::monad::Profile;

pub use config::InstanceConfig;

/// Environment variable that takes precedence over `--seed`.
pub const SEED_ENV: &str = "MONADFORGE_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config field `{field}`: {msg}")]
    Config { field: String, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] monadforge_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        3
    }
}

#[derive(Debug, Parser)]
#[command(name = "monadforge", version, about = "Exact certificates for monads on products of projective spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Knobs shared by every command that runs a certifier or the oracle.
#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// Twist profile (paper|homogeneous), overriding the config.
    #[arg(long, value_parser = parse_profile)]
    pub profile: Option<Profile>,
    /// Prime for randomized rank trials and modular elimination.
    #[arg(long)]
    pub prime: Option<u64>,
    /// Seed for randomized rank trials; MONADFORGE_SEED wins over it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random evaluation points.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Largest exterior power examined by the stability certifier.
    #[arg(long = "max-q")]
    pub max_q: Option<u64>,
    /// Largest oracle domain attempted.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Worker threads (1 runs sequentially).
    #[arg(long)]
    pub jobs: Option<usize>,
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixFormat {
    Txt,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every certifier on one instance.
    Certify {
        #[arg(long)]
        config: PathBuf,
        /// Certificate JSON destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Markdown report destination.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Record wall time in the report (makes output run-dependent).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Print h^q of a line bundle on (P^n1)^2 x ... x (P^ns)^2.
    Cohomology {
        /// Comma-separated n_i.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        /// Comma-separated twist, one entry per slot.
        #[arg(long, allow_hyphen_values = true)]
        twist: String,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Dump the two monad matrices.
    Matrices {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "txt")]
        format: MatrixFormat,
        /// Directory receiving a_mat.<ext> and b_mat.<ext>; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_profile)]
        profile: Option<Profile>,
    },
    /// Print h^0 of wedge^q K (B) and how it was obtained.
    Sections {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        twist: String,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Certify the whole grid s <= 2, n_i <= 2, alpha_i <= 2, k <= 2.
    CertifyGrid {
        /// Summary JSON destination.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Markdown summary destination; stdout when absent.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        flags: RunFlags,
    },
}

/// Parses `argv` and runs it against the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Parses `argv` and runs it, writing results to `out` and diagnostics to
/// `err`. Returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match commands::dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
