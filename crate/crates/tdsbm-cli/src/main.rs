//! Command-line front end: ingest trip CSVs, fit block models, evaluate
//! and export them, and sample synthetic networks.
//!
//! Every command takes its settings from flags, optionally underlaid by a
//! TOML or JSON config file (flags win), and writes the fully resolved
//! settings next to its outputs so a run can be replayed exactly with
//! `--config <out>/resolved-config.json`.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or schema error.

mod cmd_evaluate;
mod cmd_export;
mod cmd_fit;
mod cmd_generate;
mod cmd_ingest;
mod common;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "tdsbm",
    version,
    about = "Time-dependent block models for hourly trip networks"
)]
struct Cli {
    /// Cap the worker thread count; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean trip CSVs and build the hourly trip network
    Ingest(cmd_ingest::IngestArgs),
    /// Fit a model to a trip network
    Fit(cmd_fit::FitArgs),
    /// Score a fitted model file against a network
    Evaluate(cmd_evaluate::EvaluateArgs),
    /// Sample a synthetic network from a fitted model file
    Generate(cmd_generate::GenerateArgs),
    /// Export maps and plotting tables from a fitted model file
    Export(cmd_export::ExportArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: setting thread count: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Ingest(args) => cmd_ingest::run(args),
        Command::Fit(args) => cmd_fit::run(args),
        Command::Evaluate(args) => cmd_evaluate::run(args),
        Command::Generate(args) => cmd_generate::run(args),
        Command::Export(args) => cmd_export::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Usage and schema problems exit 2, everything else 1.
fn exit_code(err: &anyhow::Error) -> u8 {
    let schema_like = err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<tdsbm::Error>(),
            Some(tdsbm::Error::Schema(_) | tdsbm::Error::Config(_))
        )
    });
    if schema_like {
        2
    } else {
        1
    }
}
