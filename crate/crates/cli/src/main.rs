//! `scone` — command-line front end for the finite-model checker.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use scone_cli::model::canonicalize;
use scone_cli::runner::{run, verify_report, Emit, RunConfig};

#[derive(Parser)]
#[command(name = "scone", version, about = "Finite-model checker for interval-based models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitArg {
    Json,
    Md,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a selection of checks against a model file and print the report.
    Run {
        /// Path to the model file (JSON).
        model: PathBuf,
        /// Check groups or exact check names; defaults to `all`.
        selections: Vec<String>,
        /// Per-check element budget.
        #[arg(long, default_value_t = scone_core::budget::DEFAULT_MAX_ELEMENTS)]
        budget: usize,
        /// Worker threads; reports are byte-identical for any value.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output format.
        #[arg(long, value_enum, default_value_t = EmitArg::Json)]
        emit: EmitArg,
        /// Directory of golden reports; the run must match byte-for-byte.
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Ad-hoc formula to check alongside the selection, as `formula.cli`.
        #[arg(long)]
        formula: Option<String>,
    },
    /// Print the canonical form of a model file (sorted keys, LF, no floats).
    Canon {
        /// Path to the model file (JSON).
        model: PathBuf,
    },
    /// Re-run every check named in a report and confirm each record.
    VerifyReport {
        /// Path to the model file (JSON).
        model: PathBuf,
        /// Path to a JSON report produced by `run`.
        report: PathBuf,
        /// Per-check element budget.
        #[arg(long, default_value_t = scone_core::budget::DEFAULT_MAX_ELEMENTS)]
        budget: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Run {
            model,
            selections,
            budget,
            jobs,
            emit,
            golden,
            formula,
        } => run(&RunConfig {
            model_path: model,
            selections,
            budget,
            jobs,
            emit: match emit {
                EmitArg::Json => Emit::Json,
                EmitArg::Md => Emit::Md,
            },
            golden,
            formula,
        }),
        Cmd::Canon { model } => std::fs::read_to_string(&model)
            .map_err(|e| scone_cli::model::CliError::Validation {
                message: format!("could not read model {}: {e}", model.display()),
            })
            .and_then(|text| canonicalize(&text))
            .map(|canon| {
                print!("{canon}");
                0
            }),
        Cmd::VerifyReport {
            model,
            report,
            budget,
        } => verify_report(&model, &report, budget),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
