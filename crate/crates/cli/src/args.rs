use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qdtest",
    version,
    about = "Simulated quantum testers for closeness and k-wise uniformity of distributions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the ℓ² (optionally tolerant) or ℓ¹ closeness tester.
    TestCloseness(ClosenessArgs),
    /// Run the k-wise uniformity tester.
    TestKwise(KwiseArgs),
    /// Estimate the ℓ² distance between two distributions.
    Estimate(EstimateArgs),
    /// Sweep ε or n and record query counts and success frequencies.
    Sweep(SweepArgs),
    /// Run the built-in invariant suites.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Garbage {
    Basis,
    Haar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    L2,
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTester {
    L2,
    L1,
    Kwise,
}

/// Flags shared by every experiment subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Number of independent trials.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Seed; identical flags and seed give byte-identical output.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Workspace states of the purified oracles.
    #[arg(long, value_enum, default_value_t = Garbage::Basis)]
    pub garbage: Garbage,
    /// First distribution file (.json or .csv).
    #[arg(long, value_name = "FILE")]
    pub dist: Option<PathBuf>,
    /// Second distribution file (.json or .csv).
    #[arg(long, value_name = "FILE")]
    pub dist2: Option<PathBuf>,
    /// Instance generator, NAME[:args].
    #[arg(long = "gen", value_name = "NAME[:args]")]
    pub generator: Option<String>,
    /// Sample-space size for closeness generators, string length for k-wise ones.
    #[arg(long)]
    pub n: Option<usize>,
    /// Report destination (stdout when absent).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ClosenessArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    /// Tolerance of the ℓ² tester; selecting it runs the tolerant tester.
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long, value_enum, default_value_t = Metric::L2)]
    pub metric: Metric,
    /// Repeat each trial this many times (odd) and take the majority.
    #[arg(long, default_value_t = 1)]
    pub majority: usize,
}

#[derive(Debug, Clone, Args)]
pub struct KwiseArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0.3)]
    pub eps: f64,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value_t = 1)]
    pub majority: usize,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = SweepTester::L2)]
    pub tester: SweepTester,
    /// Comma-separated ε grid (defaults to --eps alone).
    #[arg(long, value_delimiter = ',')]
    pub eps_grid: Vec<f64>,
    /// Comma-separated n grid (defaults to --n alone).
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Vec<usize>,
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.5)]
    pub nu: f64,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// Write a line plot of mean queries against 1/ε (or n) as SVG.
    #[arg(long, value_name = "FILE")]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SelfcheckArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replace S_Π by −S_Π inside amplitude estimation; the check must fail.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}
