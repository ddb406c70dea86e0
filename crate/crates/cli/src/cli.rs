//! Command-line syntax.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::Table;

/// Rearrangement algorithms, dependence measures and fit diagnostics.
#[derive(Debug, Parser)]
#[command(name = "blockra", version, about)]
pub struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands.
#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "verb", rename_all = "kebab-case")]
pub enum Command {
    /// Standard RA: make each column countermonotonic to the rest.
    Ra(RunArgs),
    /// Block RA1: rearrange the most positively dependent block first.
    Bra1(RunArgs),
    /// Block RA2: passes over sampled partitions until no improvement.
    Bra2(RunArgs),
    /// MCMC over block rearrangements with Gumbel-ranking proposals.
    Mcmc(McmcArgs),
    /// Exact minima: brute force, closed form, or a zero-sum test matrix.
    Oracle(OracleArgs),
    /// Multivariate dependence measure of a matrix.
    Measure(MeasureArgs),
    /// Fit the dependence among margins so their sum matches a target.
    FitSum(FitArgs),
    /// Recover a (P, G) copula from P, G and spread quantiles.
    Spread(SpreadArgs),
    /// KS and W2 verdict for a sample against a target.
    Gof(GofArgs),
    /// Simulated median thresholds of the KS or W2 statistic.
    Thresholds(ThresholdArgs),
    /// Regenerate a benchmark table.
    Bench(BenchArgs),
}

/// Options of `ra`, `bra1` and `bra2`.
#[derive(Debug, Args, Serialize)]
pub struct RunArgs {
    /// Matrix CSV (no header).
    #[arg(long)]
    pub input: PathBuf,
    /// Seed of the partition sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Partitions per step (default min(512, 2^(n-1) - 1)).
    #[arg(long)]
    pub n_sim: Option<usize>,
    /// Block RA1 stopping threshold on the dependence measure.
    #[arg(long, default_value_t = -0.9999, allow_hyphen_values = true)]
    pub rho_stop: f64,
    /// Sweep, pass or iteration budget.
    #[arg(long, default_value_t = 100_000)]
    pub max_sweeps: usize,
    /// Block RA2 relative improvement tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Write the final matrix here.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
}

/// Options of `mcmc`.
#[derive(Debug, Args, Serialize)]
pub struct McmcArgs {
    /// Matrix CSV (no header).
    #[arg(long)]
    pub input: PathBuf,
    /// `variance` or `cvx:<name>` (square, abs, exp, pow:P, stop-loss:K).
    #[arg(long, default_value = "variance")]
    pub objective: String,
    /// Iterations.
    #[arg(long, default_value_t = 10_000)]
    pub iters: usize,
    /// Gumbel rate; default 5 / sd of the fixed block sums per proposal.
    #[arg(long)]
    pub gumbel_r: Option<f64>,
    /// Chain seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Objective value treated as the global optimum.
    #[arg(long, default_value_t = 1e-14)]
    pub absorb_tol: f64,
    /// Trace CSV with header `iter,objective,accepted`.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Write the best matrix here.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
}

/// Oracle modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMode {
    /// Exhaustive search over an input matrix.
    Brute,
    /// Closed form for columns `1..=m`.
    Haus,
    /// Random normal matrix with zero row sums.
    Zerosum,
}

/// Options of `oracle`.
#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    /// Which oracle.
    #[arg(long, value_enum)]
    pub mode: OracleMode,
    /// Matrix CSV for `brute`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Rows for `haus` and `zerosum`.
    #[arg(long)]
    pub m: Option<usize>,
    /// Columns for `haus` and `zerosum`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Seed for `zerosum`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Enumerate two column blocks `0..split` and `split..n` separately.
    #[arg(long)]
    pub split: Option<usize>,
    /// Refuse enumerations larger than this.
    #[arg(long, default_value_t = 100_000_000)]
    pub max_arrangements: u128,
    /// Write the argmin (or generated) matrix here.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
}

/// Options of `measure`.
#[derive(Debug, Args, Serialize)]
pub struct MeasureArgs {
    /// Matrix CSV (no header).
    #[arg(long)]
    pub input: PathBuf,
    /// Estimate from this many random partitions instead of enumerating.
    #[arg(long)]
    pub sampled: Option<usize>,
    /// Seed of the sampled estimate.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest column count enumerated exactly.
    #[arg(long, default_value_t = 20)]
    pub exact_cap: usize,
}

/// Margin families on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MarginArg {
    /// `U[-a, a]`.
    Uniform,
    /// `N(0, sigma^2)`.
    Normal,
}

/// Starting arrangement of a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StartArg {
    /// Columns in grid order.
    Sorted,
    /// Columns shuffled with the seed.
    Shuffled,
}

/// Variance the margin sum is rescaled to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceArg {
    /// Sample variance of the discretized target.
    Grid,
    /// Variance of the continuous target.
    Analytic,
}

/// Options of `fit-sum`.
#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// Margin family.
    #[arg(long, value_enum)]
    pub margins: MarginArg,
    /// Number of margin columns fitted.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Target law: normal, uniform, normal:MU,SD or uniform:LO,HI.
    #[arg(long)]
    pub target: String,
    /// Grid size.
    #[arg(long, default_value_t = 1_000_000)]
    pub m: usize,
    /// Seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Starting arrangement.
    #[arg(long, value_enum, default_value_t = StartArg::Sorted)]
    pub start: StartArg,
    /// Recalibration variance.
    #[arg(long, value_enum, default_value_t = VarianceArg::Grid)]
    pub variance_target: VarianceArg,
    /// Starting scale (default 1.5 for uniforms, 0.4 for normals).
    #[arg(long)]
    pub initial_scale: Option<f64>,
    /// Relative tolerance on variance and scale.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Pass budget.
    #[arg(long, default_value_t = 2000)]
    pub max_passes: usize,
    /// Partitions per pass.
    #[arg(long)]
    pub n_sim: Option<usize>,
    /// Replicates when thresholds must be simulated.
    #[arg(long, default_value_t = 41)]
    pub threshold_reps: usize,
    /// Use the Kolmogorov limit for the KS threshold when no tabulated value
    /// applies.
    #[arg(long)]
    pub asymptotic_ks: bool,
    /// Append countermonotone pairs up to this many margin columns.
    #[arg(long)]
    pub extend_to: Option<usize>,
    /// Write the margin columns (the joint sample) here.
    #[arg(long)]
    pub emit_joint: Option<PathBuf>,
    /// Write the full fit matrix, target column included, here.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
}

/// Options of `spread`.
#[derive(Debug, Args, Serialize)]
pub struct SpreadArgs {
    /// Quantiles of P, one per line.
    #[arg(long)]
    pub fp: PathBuf,
    /// Quantiles of h G, one per line.
    #[arg(long)]
    pub fg: PathBuf,
    /// Quantiles of the spread S = P - h G, one per line.
    #[arg(long)]
    pub fs: PathBuf,
    /// Seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Partitions per pass.
    #[arg(long)]
    pub n_sim: Option<usize>,
    /// Write the m x 2 (P, hG) sample here.
    #[arg(long)]
    pub emit_joint: Option<PathBuf>,
}

/// The two statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestArg {
    /// Kolmogorov-Smirnov.
    Ks,
    /// L2-Wasserstein.
    W2,
}

/// Options of `gof`.
#[derive(Debug, Args, Serialize)]
pub struct GofArgs {
    /// Sample values, one per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Target law.
    #[arg(long)]
    pub target: String,
    /// Sample size the thresholds refer to (default: the input length).
    #[arg(long)]
    pub m: Option<usize>,
    /// Replicates when thresholds must be simulated.
    #[arg(long, default_value_t = 41)]
    pub reps: usize,
    /// Threshold simulation seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use the Kolmogorov limit for the KS threshold.
    #[arg(long)]
    pub asymptotic_ks: bool,
    /// Distance grid size.
    #[arg(long, default_value_t = 50_000)]
    pub grid: usize,
    /// Worker threads for threshold simulation.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// Options of `thresholds`.
#[derive(Debug, Args, Serialize)]
pub struct ThresholdArgs {
    /// Statistic.
    #[arg(long, value_enum)]
    pub test: TestArg,
    /// Target law.
    #[arg(long)]
    pub target: String,
    /// Sample size.
    #[arg(long, default_value_t = 1_000_000)]
    pub m: usize,
    /// Replicates.
    #[arg(long, default_value_t = 41)]
    pub reps: usize,
    /// Seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// Options of `bench`.
#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    /// Table to regenerate.
    #[arg(value_enum)]
    pub table: Table,
    /// Replicates per cell.
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    /// Base seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Restrict to these cells, as M:N (repeatable).
    #[arg(long = "cell", value_parser = parse_cell)]
    pub cells: Vec<(usize, usize)>,
    /// Multiplicative tolerance on the reference means.
    #[arg(long, default_value_t = 3.0)]
    pub band: f64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

fn parse_cell(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s.split_once(':').ok_or_else(|| format!("expected M:N, got {s:?}"))?;
    let m = m.parse().map_err(|_| format!("bad row count {m:?}"))?;
    let n = n.parse().map_err(|_| format!("bad column count {n:?}"))?;
    Ok((m, n))
}
