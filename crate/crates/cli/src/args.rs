use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "ideal", version, about = "Bayesian ideal-point estimation for roll-call votes")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Random seed; overrides `sampler.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for chain-level parallelism. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Only print errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Filter the data, run the sampler and write every artifact.
    Fit(FitArgs),
    /// Generate a synthetic roll-call matrix with known parameters.
    Simulate(SimulateArgs),
    /// Posterior summaries of a finished run; `--truth` adds recovery metrics.
    Summarize(SummarizeArgs),
    /// Rank-occupancy tables for pivot legislators.
    Pivots(PivotsArgs),
    /// Posterior predictive p-values.
    Ppc(PpcArgs),
    /// Convergence diagnostics (split-chain R̂ and effective sample size).
    Diagnose(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct FitArgs {
    /// Roll-call file; overrides `data.path`.
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
    /// `csv` or `json`; overrides `data.format`.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long)]
    pub chains: Option<usize>,
    /// Latent dimension.
    #[arg(long)]
    pub dimensions: Option<usize>,
    /// Prior variance of the item parameters.
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long)]
    pub min_participation: Option<f64>,
    /// Fit the party-incentive model.
    #[arg(long)]
    pub party: bool,
    /// Credible level for summaries.
    #[arg(long)]
    pub level: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 300)]
    pub m: usize,
    #[arg(long, short = 'd', default_value_t = 1)]
    pub dimensions: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha_scale: f64,
    #[arg(long, default_value_t = 0.5)]
    pub mu_scale: f64,
    #[arg(long, default_value_t = 0.0)]
    pub missing_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    pub zero_alpha_fraction: f64,
    /// Add a party effect: alternating groups, δ cycling through -2, 0, 2.
    #[arg(long)]
    pub party: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Directory written by `ideal fit`; defaults to `--out` or `output.dir`.
    pub run: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SummarizeArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// `truth_beta.csv` from `ideal simulate`.
    #[arg(long, value_name = "FILE")]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub level: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PivotsArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// 1-based ranks, comma separated; default: the median.
    #[arg(long, value_delimiter = ',')]
    pub ranks: Vec<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PpcArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Observed data; defaults to the run's filtered matrix.
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
    /// Statistic names, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub statistics: Vec<String>,
    #[arg(long)]
    pub replicates: Option<usize>,
}
