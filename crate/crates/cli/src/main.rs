//! `hme`: synthetic data, primitive graphs, EGAT training, prediction and
//! evaluation from the command line.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hme_core::egat::EgatError;
use hme_core::pipeline::PipelineError;
use thiserror::Error;

use config::{Overrides, PipelineConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Egat(EgatError::NonFiniteLoss { .. }) => CliError::Numeric(e.to_string()),
            e => CliError::Data(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hme", version, about = "Handwritten math structure recognition")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic InkML + LG pairs.
    Synth {
        #[arg(long)]
        out: PathBuf,
    },
    /// Build primitive graphs from InkML (with optional sibling LG).
    BuildGraph {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the link predictor on annotated graphs.
    Train {
        #[arg(long)]
        graphs: PathBuf,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Emit LG, LaTeX, DOT and link probabilities per graph.
    Predict {
        #[arg(long)]
        graphs: PathBuf,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predictions against ground-truth LG files.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Report JSON path; a `.txt` table is written beside it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    let cfg = PipelineConfig::resolve(&cli.overrides)?;
    match &cli.command {
        Command::Synth { out } => commands::cmd_synth(&cfg, out),
        Command::BuildGraph { input, out } => commands::cmd_build_graph(&cfg, input, out),
        Command::Train { graphs, checkpoint } => commands::cmd_train(&cfg, graphs, checkpoint.as_deref()),
        Command::Predict { graphs, checkpoint, out } => commands::cmd_predict(&cfg, graphs, checkpoint.as_deref(), out),
        Command::Eval { pred, gt, out } => commands::cmd_eval(&cfg, pred, gt, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(msg) => {
            print!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
