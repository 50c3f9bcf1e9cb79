//! `dperm`: generate and trace fingerprinting codes, audit column bias, run
//! coalition attacks and sweep private mechanisms against lower-bound curves.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;

use clap::{Args, Parser, Subcommand};
use config::FileConfig;
use error::CliResult;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "dperm", version, about = "Fingerprinting-code and private ERM lower-bound experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a codebook, its secret and a manifest (optionally a replicated dataset).
    Gen(GenArgs),
    /// Trace a forged word against a codebook and secret.
    Trace(TraceArgs),
    /// Fraction of near-unbiased core columns across seeds.
    AuditBias(AuditArgs),
    /// Monte Carlo coalition attack against the code.
    Attack(AttackArgs),
    /// Sweep mechanisms over hard instances and compare with the lower-bound curve.
    Lowerbound(LowerboundArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of users.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub xi: Option<f64>,
    /// Core code length, overriding the formula value.
    #[arg(long)]
    pub d: Option<usize>,
    /// Also write a dataset with each codeword repeated k times.
    #[arg(long)]
    pub k: Option<usize>,
    /// Dataset rows (default k·n); the rest are zero rows.
    #[arg(long)]
    pub rows: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub codebook: Option<PathBuf>,
    #[arg(long)]
    pub secret: Option<PathBuf>,
    /// File holding the forged word as one line of 0/1 characters.
    #[arg(long)]
    pub word: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: Option<usize>,
    /// Core code length (formula value from n and ξ when omitted).
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct AttackArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// majority_vote, copy_first_row, random_consistent or mechanism_round.
    #[arg(long)]
    pub adversary: Option<String>,
    /// Comma-separated 0-based user indices (default: every user).
    #[arg(long, value_delimiter = ',')]
    pub coalition: Vec<usize>,
    /// Mechanism used by mechanism_round.
    #[arg(long)]
    pub mechanism: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct LowerboundArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Core code lengths; the datasets have 5d columns.
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub delta: Vec<f64>,
    /// Geometries, e.g. `1,2,inf`.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<String>,
    /// Replication factor (default ⌈ln(1/δ)⌉, or 1 when δ = 0).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub mechanisms: Vec<String>,
    /// Constant in front of the lower-bound curve.
    #[arg(long)]
    pub c0: Option<f64>,
}

/// Runs a parsed command line, writing human-facing output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let common = match &cli.command {
        Command::Gen(a) => &a.common,
        Command::Trace(a) => &a.common,
        Command::AuditBias(a) => &a.common,
        Command::Attack(a) => &a.common,
        Command::Lowerbound(a) => &a.common,
    };
    let file = FileConfig::load(common.config.as_deref())?;
    match &cli.command {
        Command::Gen(a) => commands::gen::run(&commands::gen::resolve(a, &file)?, out),
        Command::Trace(a) => commands::trace::run(&commands::trace::resolve(a, &file)?, out),
        Command::AuditBias(a) => commands::audit::run(&commands::audit::resolve(a, &file)?, out),
        Command::Attack(a) => commands::attack::run(&commands::attack::resolve(a, &file)?, out),
        Command::Lowerbound(a) => commands::lowerbound::run(&commands::lowerbound::resolve(a, &file)?, out),
    }
}
