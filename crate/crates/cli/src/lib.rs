//! Batch front end: configuration, orchestration and artifact output.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

pub use config::{load_config, parse_config, Overrides, RunConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("ConfigParse at line {line}, column {column}: {message}")]
    ConfigParse { line: usize, column: usize, message: String },
    #[error("ConfigRange(\"{0}\")")]
    ConfigRange(String),
    #[error("config file: {0}")]
    ConfigFile(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("output: {0}")]
    Output(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub(crate) fn range(key: &str, _cause: impl std::fmt::Display) -> CliError {
        CliError::ConfigRange(key.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::ConfigParse { .. }
            | CliError::ConfigRange(_)
            | CliError::ConfigFile(_)
            | CliError::Usage(_)
            | CliError::Output(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fgs", version, about = "Ground states of (1 - Δ)^α u = f(u) on a periodic box")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Args)]
struct Flags {
    /// Sectioned key = value file, or JSON when the name ends in .json.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// 1 gives bitwise reproducible output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long = "N", global = true)]
    dim: Option<usize>,
    #[arg(long = "M", global = true)]
    points: Option<usize>,
    #[arg(long = "L", global = true)]
    half_length: Option<f64>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true)]
    tmin: Option<f64>,
    #[arg(long, global = true)]
    tmax: Option<f64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ground state: report.json and ground_state.fgs1.
    Solve,
    /// Energy and g along the dilation path of the ground state: path_scan.csv.
    PathScan,
    /// Spatially dependent problem against its limit: spatial_report.json.
    Spatial,
    /// Radial kernel table: kernel.csv and kernel_summary.json.
    Kernel,
    /// Invariant battery: verify.json; exits 1 on any failed suite.
    Verify,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            seed: self.seed,
            threads: self.threads,
            alpha: self.alpha,
            dim: self.dim,
            points: self.points,
            half_length: self.half_length,
            p: self.p,
            tmin: self.tmin,
            tmax: self.tmax,
            samples: self.samples,
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli.flags.config.as_deref(), &cli.flags.overrides())?;
    let job = || match cli.command {
        Command::Solve => commands::solve(&cfg),
        Command::PathScan => commands::path_scan(&cfg),
        Command::Spatial => commands::spatial(&cfg),
        Command::Kernel => commands::kernel(&cfg),
        Command::Verify => verify::run_verify(&cfg),
    };
    let artifacts = if cfg.threads == 0 {
        job()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(job)?
    };
    artifacts.commit(&cfg.out_dir)?;
    match artifacts.failure {
        Some(msg) => Err(CliError::CheckFailed(msg)),
        None => Ok(()),
    }
}

/// Runs one command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!("ERROR:2:{}", text.lines().next().unwrap_or("bad arguments").trim_start_matches("error: "));
            return 2;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("ERROR:{code}:{e}");
            code
        }
    }
}
