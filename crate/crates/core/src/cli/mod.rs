//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification or replay check failed,
//! 2 an input could not be read or parsed, 3 inputs disagree in dimension,
//! 4 invalid flags or configuration.

mod commands;
mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use commands::{payload_digest, strip_timing};
pub use manifest::{sha256_file, sha256_hex, FileDigest, RunManifest};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;
pub const EXIT_FLAGS: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "jcdc", version, about = "Community detection on networks with node features")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Fit the joint criterion to an edge list and a feature table.
    Fit(FitArgs),
    /// Run spectral clustering or k-means.
    Baseline(BaselineArgs),
    /// Run the simulation grid and write heatmap CSVs.
    Simulate(SimulateArgs),
    /// Run the numerical theory checks.
    Verify(VerifyArgs),
    /// Re-run the command recorded in a manifest and compare outputs.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fit(_) => "fit",
            Command::Baseline(_) => "baseline",
            Command::Simulate(_) => "simulate",
            Command::Verify(_) => "verify",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct FitArgs {
    /// Tab-separated edge list: `u<TAB>v[<TAB>weight]`.
    #[arg(long)]
    pub edges: PathBuf,
    /// CSV with a `node_id` column followed by feature columns.
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long = "w", default_value_t = 5.0)]
    pub w: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub lambda: f64,
    #[arg(long, default_value_t = 5.0)]
    pub mbeta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Column kinds, e.g. `cont,cat,ord`; all continuous when omitted.
    #[arg(long)]
    pub kinds: Option<String>,
    #[arg(long = "min-size", default_value_t = 1)]
    pub min_size: usize,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    #[arg(long, default_value = "jcdc_out")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    Sc,
    Km,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct BaselineArgs {
    #[arg(long, value_enum)]
    pub method: BaselineMethod,
    /// Required for `sc`.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Required for `km`; also fixes the node count for `sc` when given.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Node count for `sc` without a feature file.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub kinds: Option<String>,
    #[arg(long, default_value = "jcdc_out")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridChoice {
    /// 3 x 3 grid, 10 replicates.
    Desk,
    /// 11 x 7 grid, 30 replicates.
    Paper,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = GridChoice::Desk)]
    pub grid: GridChoice,
    /// Comma-separated subset of jcdc_w5, jcdc_w15, sc, km.
    #[arg(long, default_value = "jcdc_w5,jcdc_w15,sc,km")]
    pub methods: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override the replicate count.
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, default_value = "jcdc_out")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Out/in ratio of the reference two-block model.
    #[arg(long, default_value_t = 0.25)]
    pub r: f64,
    #[arg(long = "w", default_value_t = 5.0)]
    pub w: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mphi: f64,
    #[arg(long, default_value_t = 1.5)]
    pub mbeta: f64,
    /// Directory for `verify.json`; nothing is written when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Where to write the re-run outputs (default: `<original out>/replay`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Io(_) | Error::Json(_) => EXIT_PARSE,
        Error::Dimension(_) => EXIT_DIMENSION,
        Error::Config(_) | Error::TooLarge { .. } => EXIT_FLAGS,
        Error::DegenerateLaplacian(_) => EXIT_CHECK_FAILED,
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FLAGS } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.threads {
        Some(0) => Err(Error::Config("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))
            .and_then(|pool| pool.install(|| commands::dispatch(&cli.command))),
        None => commands::dispatch(&cli.command),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
