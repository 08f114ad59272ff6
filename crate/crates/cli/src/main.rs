//! Command-line interface to the topological-memory simulation lab.
//!
//! Subcommands: `decode`, `threshold`, `memory-time`, `chunk`, `hook`,
//! `selftest`. A flat key=value config file can predefine any flag; flags on
//! the command line override it. Exit codes: 0 success, 1 usage error,
//! 2 experiment-level failure.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

mod commands;
mod config;

#[derive(Parser, Debug)]
#[command(name = "topomem", version, about = "Topological quantum memory simulation lab")]
pub struct Cli {
    /// Flat key=value config file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Code family: cubic3d or toric2d.
    #[arg(long)]
    code: Option<String>,
    /// Lattice size(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    size: Vec<usize>,
    /// Inverse temperature(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    /// Error rate(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    rate: Vec<f64>,
    /// Samples (or trials) per parameter point.
    #[arg(long)]
    samples: Option<u64>,
    /// Base RNG seed; every sample derives an independent stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Decoder mode: standard or specialized.
    #[arg(long)]
    mode: Option<String>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output path (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decode an error or syndrome file and print the outcome.
    Decode {
        #[command(flatten)]
        common: Common,
        /// Input file: lines `X x y z q` / `Z x y z q` / `Y x y z q` for
        /// error letters, or `D x y z sector` for syndrome defects.
        #[arg(long)]
        input: PathBuf,
    },
    /// Failure-fraction sweep over sizes and rates with the standard decoder.
    Threshold {
        #[command(flatten)]
        common: Common,
    },
    /// Thermal memory-time campaign (cubic code).
    MemoryTime {
        #[command(flatten)]
        common: Common,
        /// Censoring cutoff as a multiple of the trial interval.
        #[arg(long)]
        t_max_factor: Option<f64>,
    },
    /// Sample site errors and report their chunk decomposition.
    Chunk {
        #[command(flatten)]
        common: Common,
        /// Box parameter Q (>= 6).
        #[arg(long)]
        q: Option<usize>,
    },
    /// Generate a hook error path and report its cost.
    Hook {
        #[command(flatten)]
        common: Common,
        /// Hook level p.
        #[arg(long)]
        level: Option<usize>,
    },
    /// Quick internal consistency checks.
    Selftest,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap reports --help/--version through the error path with a
            // success status.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let overrides = match cli.config.as_deref().map(config::load) {
        Some(Ok(map)) => map,
        Some(Err(e)) => {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
        None => Default::default(),
    };
    match run(cli, overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli, file_defaults: config::Map) -> anyhow::Result<()> {
    match cli.command {
        Command::Decode { common, input } => {
            let c = config::merge(common, &file_defaults)?;
            commands::decode(&c, &input)
        }
        Command::Threshold { common } => {
            let c = config::merge(common, &file_defaults)?;
            commands::threshold(&c)
        }
        Command::MemoryTime { common, t_max_factor } => {
            let c = config::merge(common, &file_defaults)?;
            let factor = t_max_factor
                .or_else(|| file_defaults.get("t_max_factor").and_then(|v| v.parse().ok()));
            commands::memory_time(&c, factor)
        }
        Command::Chunk { common, q } => {
            let c = config::merge(common, &file_defaults)?;
            let q = q.or_else(|| file_defaults.get("q").and_then(|v| v.parse().ok())).unwrap_or(10);
            commands::chunk(&c, q)
        }
        Command::Hook { common, level } => {
            let c = config::merge(common, &file_defaults)?;
            let level =
                level.or_else(|| file_defaults.get("level").and_then(|v| v.parse().ok())).unwrap_or(0);
            commands::hook(&c, level)
        }
        Command::Selftest => commands::selftest(),
    }
}
