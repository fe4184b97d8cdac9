//! Command-line front end: dataset generation, cross-validated training,
//! ensemble evaluation, impurity importances and a three-model demo.
//!
//! Every command is a function of its resolved configuration and seed, and
//! every file it writes starts with comment lines recording both.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "syncpred", version, about = "Learning to predict synchronization of coupled oscillators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config file; missing keys fall back to the command's defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Root seed; overrides the config's seed.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Dotted-path override such as `dataset.samples_per_class=100`; the value
    /// is parsed as JSON, falling back to a string. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Build a balanced dataset and write its manifest and dynamics table.
    Gen,
    /// Stratified k-fold metrics for classifiers and the baseline.
    TrainEval,
    /// Subgraph ensemble versus pooled-subgraph baseline.
    Ensemble,
    /// Impurity importances over repeated train/test splits.
    Importance,
    /// Three models on one lattice-plus-shortcuts graph from one start.
    Demo,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::TrainEval => "train-eval",
            Command::Ensemble => "ensemble",
            Command::Importance => "importance",
            Command::Demo => "demo",
        }
    }
}

/// Runs the command and returns the summary lines for stdout.
pub fn run(cli: &Cli) -> anyhow::Result<Vec<String>> {
    let inv = commands::Invocation {
        config: cli.config.as_deref(),
        seed: cli.seed,
        out: &cli.out,
        overrides: &cli.set,
    };
    match cli.command {
        Command::Gen => commands::gen::run(&inv),
        Command::TrainEval => commands::train_eval::run(&inv),
        Command::Ensemble => commands::ensemble::run(&inv),
        Command::Importance => commands::importance::run(&inv),
        Command::Demo => commands::demo::run(&inv),
    }
}

/// Stable tag for the failure class of `e`.
pub fn error_kind(e: &anyhow::Error) -> &'static str {
    for cause in e.chain() {
        if let Some(core) = cause.downcast_ref::<syncpred_core::Error>() {
            return core.kind();
        }
        if cause.is::<config::ConfigError>() || cause.is::<serde_json::Error>() {
            return "config";
        }
        if cause.is::<std::io::Error>() {
            return "io";
        }
        if cause.is::<csv::Error>() {
            return "csv";
        }
    }
    "error"
}

/// One-line JSON error report.
pub fn error_line(e: &anyhow::Error) -> String {
    serde_json::json!({
        "error": {
            "kind": error_kind(e),
            "message": format!("{e:#}"),
        }
    })
    .to_string()
}
