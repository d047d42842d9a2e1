//! Command-line front end: load a model file, run verification suites,
//! and emit the report.
//!
//! Exit status: 0 when every check passed, 1 when at least one check
//! failed, 2 when the model could not be loaded or the invocation was
//! invalid.

use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wicklab_core::model::{load_model, ModelFile};
use wicklab_core::report::{emit_json, emit_text, run_named, RunOptions, SUITE_NAMES};

#[derive(Parser)]
#[command(
    name = "wicklab",
    version,
    about = "Workbench for canonical transformations over Gaussian Q-space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model file and run verification suites against it.
    Check {
        /// Path to the model JSON file.
        model: PathBuf,
        /// Suite to run (repeatable); defaults to the model's own list.
        #[arg(long = "suite", value_name = "NAME")]
        suites: Vec<String>,
        /// Seed for randomized checks.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the model's truncation cutoff.
        #[arg(long)]
        cutoff: Option<u32>,
        /// Report format.
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Write the report to a file instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Record wall-clock timings (reruns are then no longer
        /// byte-identical).
        #[arg(long)]
        timings: bool,
    },
    /// List the available suite names.
    Suites,
}

/// Read a positive integer override from the environment.
fn env_u32(name: &str) -> Result<Option<u32>, String> {
    match std::env::var(name) {
        Ok(raw) => raw
            .trim()
            .parse::<u32>()
            .map(Some)
            .map_err(|_| format!("{name} must be a non-negative integer, got {raw:?}")),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(format!("{name}: {e}")),
    }
}

fn run_check(
    model_path: &Path,
    suites: &[String],
    seed: Option<u64>,
    cutoff: Option<u32>,
    format: Format,
    out: Option<&PathBuf>,
    timings: bool,
) -> Result<bool, String> {
    let model: ModelFile = load_model(model_path).map_err(|e| e.to_string())?;
    model.validate().map_err(|e| e.to_string())?;
    for name in suites {
        if !SUITE_NAMES.contains(&name.as_str()) {
            return Err(format!(
                "unknown suite {name:?}; valid names: {}",
                SUITE_NAMES.join(", ")
            ));
        }
    }

    let mut opts = RunOptions {
        timings,
        ..RunOptions::default()
    };
    if let Some(s) = seed {
        opts.seed = s;
    }
    opts.cutoff = cutoff;
    if let Some(cap) = env_u32("WICKLAB_DEGREE_CAP")? {
        opts.degree_cap = cap;
    }
    if let Some(nodes) = env_u32("WICKLAB_QUAD_NODES")? {
        opts.node_budget = nodes;
    }

    let report = run_named(&model, suites, &opts).map_err(|e| e.to_string())?;
    let rendered = match format {
        Format::Json => emit_json(&report),
        Format::Text => emit_text(&report),
    };
    match out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(report.summary.failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check {
            model,
            suites,
            seed,
            cutoff,
            format,
            out,
            timings,
        } => match run_check(&model, &suites, seed, cutoff, format, out.as_ref(), timings) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(message) => {
                eprintln!("wicklab: {message}");
                ExitCode::from(2)
            }
        },
        Command::Suites => {
            for name in SUITE_NAMES {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
    }
}
