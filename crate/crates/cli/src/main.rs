//! `prospect` — batch pipeline for lending-prospect analysis.
//!
//! Subcommands mirror the pipeline stages: `synth` generates data,
//! `featurize` turns account/transaction tables into the discretized table,
//! `train` induces and prunes a tree, `predict` classifies new rows, and
//! `evaluate` runs stratified cross-validation plus the sector ranking.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 input data
//! error, 3 internal error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

mod commands;

use commands::{CliError, Overrides};

#[derive(Parser, Debug)]
#[command(name = "prospect", version, about = "Lending-prospect decision-tree pipeline")]
struct Cli {
    /// Key=value configuration file; flags below override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, created when missing.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Cross-validation folds.
    #[arg(long, global = true)]
    folds: Option<usize>,

    /// Pruning confidence in (0, 0.5].
    #[arg(long, global = true)]
    confidence: Option<f64>,

    /// Smallest admissible non-empty split child.
    #[arg(long, global = true)]
    min_leaf: Option<u32>,

    /// Attribute selection criterion.
    #[arg(long, global = true, value_parser = ["gain-ratio", "info-gain"])]
    criterion: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate synthetic accounts and transactions.
    Synth {
        /// Number of accounts.
        #[arg(long, default_value_t = 200)]
        accounts: usize,
    },
    /// Build the discretized feature table from raw inputs.
    Featurize {
        #[arg(long)]
        accounts: PathBuf,
        #[arg(long)]
        transactions: PathBuf,
    },
    /// Induce, prune and export the decision tree and its rules.
    Train {
        /// Discretized table with a Class_Label column.
        #[arg(long)]
        input: PathBuf,
    },
    /// Classify rows with a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// Table with the model's attribute columns.
        #[arg(long)]
        input: PathBuf,
    },
    /// Cross-validate and rank sectors.
    Evaluate {
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let overrides = Overrides {
        seed: cli.seed,
        folds: cli.folds,
        confidence: cli.confidence,
        min_leaf: cli.min_leaf,
        criterion: cli.criterion.clone(),
    };
    let result = match &cli.command {
        Command::Synth { accounts } => {
            commands::synth(cli.config.as_deref(), &overrides, &cli.out_dir, *accounts)
        }
        Command::Featurize {
            accounts,
            transactions,
        } => commands::featurize(
            cli.config.as_deref(),
            &overrides,
            &cli.out_dir,
            accounts,
            transactions,
        ),
        Command::Train { input } => {
            commands::train(cli.config.as_deref(), &overrides, &cli.out_dir, input)
        }
        Command::Predict { model, input } => {
            commands::predict(cli.config.as_deref(), &overrides, &cli.out_dir, model, input)
        }
        Command::Evaluate { input } => {
            commands::evaluate(cli.config.as_deref(), &overrides, &cli.out_dir, input)
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("prospect: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 1,
                CliError::Data(_) => 2,
                CliError::Internal(_) => 3,
            })
        }
    }
}
