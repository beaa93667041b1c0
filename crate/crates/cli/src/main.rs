//! `rbm-lab`: command-line front end to rbm-core.
//!
//! Parameters come from an optional `key = value` file and trailing
//! `key=value` arguments, later ones winning. Exit codes: 0 success,
//! 1 failed validation check, 2 bad configuration, 3 I/O failure.

mod commands;
mod output;
mod params;

use clap::{Args, Parser, Subcommand};
use output::Format;
use params::Params;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// A validation check failed; the report was written.
    Failed(String),
    Config(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<rbm_core::Error> for CliError {
    fn from(e: rbm_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Failed(m) | CliError::Config(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "rbm-lab",
    version,
    about = "Additive functionals of reset Brownian motion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Flat key = value parameter file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Parameter overrides, applied after the config file.
    #[arg(value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate paths: per-path CSV and a JSON moment summary.
    Simulate(Common),
    /// Occupation-time density on a grid, with arcsine and optional MC columns.
    Density(Common),
    /// Moments by renewal inversion next to closed forms.
    Moments(Common),
    /// Scaled cumulant generating function on a k-grid.
    Scgf(Common),
    /// Rate-function curve by Legendre transform.
    Rate(Common),
    /// Discretized variational rate at one or more values.
    Variational(Common),
    /// Run the acceptance checks and write a report.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Print the check inventory without running anything.
        #[arg(long)]
        list: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, list) = match &cli.command {
        Command::Validate { common, list } => (common.clone(), *list),
        Command::Simulate(c)
        | Command::Density(c)
        | Command::Moments(c)
        | Command::Scgf(c)
        | Command::Rate(c)
        | Command::Variational(c) => (c.clone(), false),
    };
    let mut params = match &common.config {
        Some(p) => Params::load(p)?,
        None => Params::default(),
    };
    params.apply(&common.set)?;
    if let Some(s) = common.seed {
        params.set("seed", s);
    }
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let out = commands::Sink {
        path: common.out.clone(),
        format: common.format,
    };
    match cli.command {
        Command::Simulate(_) => commands::simulate(params, &out),
        Command::Density(_) => commands::density(params, &out),
        Command::Moments(_) => commands::moments(params, &out),
        Command::Scgf(_) => commands::scgf(params, &out),
        Command::Rate(_) => commands::rate(params, &out),
        Command::Variational(_) => commands::variational(params, &out),
        Command::Validate { .. } if list => commands::validate_list(&out),
        Command::Validate { .. } => commands::validate(params, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rbm-lab: {e}");
            ExitCode::from(e.code())
        }
    }
}
