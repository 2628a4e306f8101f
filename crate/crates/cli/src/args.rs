use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use worm_core::GraphKind;

#[derive(Debug, Parser)]
#[command(
    name = "worm",
    version,
    about = "Worm process for the zero-field Ising model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the high-temperature identities and measure bounds by enumeration.
    Verify(VerifyArgs),
    /// Exact susceptibility and all pairwise correlations.
    Exact(Common),
    /// Run the worm chain and stream its trajectory.
    Sample(SampleArgs),
    /// Estimate the susceptibility or a two-point correlation.
    Estimate(EstimateArgs),
    /// Exact relaxation and mixing times against the analytic bounds.
    Spectral(SpectralArgs),
    /// Canonical-path congestion and the injection checks.
    Congestion(CongestionArgs),
}

#[derive(Debug, Clone, Args)]
#[group(skip)]
pub struct GraphSource {
    /// Edge-list file: first line n, then one "u v" pair (1-based) per line.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["kind", "dims"], required_unless_present = "kind")]
    pub graph: Option<PathBuf>,
    /// Generated graph: cycle N | path N | complete N | grid R C.
    #[arg(long = "gen", value_name = "KIND", requires = "dims")]
    pub kind: Option<GraphKind>,
    /// Sizes for --gen.
    #[arg(value_name = "DIMS", num_args = 1..=2)]
    pub dims: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
#[group(skip)]
pub struct Temperature {
    /// Inverse temperature; x = tanh(beta).
    #[arg(long, conflicts_with = "x", required_unless_present = "x")]
    pub beta: Option<f64>,
    /// Edge weight x in (0, 1).
    #[arg(long)]
    pub x: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[command(flatten)]
    pub source: GraphSource,
    #[command(flatten)]
    pub temperature: Temperature,
    /// Random seed; drawn from system entropy when absent. Always echoed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Largest edge count the exhaustive enumeration will accept.
    #[arg(long, default_value_t = 22)]
    pub max_edges: usize,
    /// Largest vertex count for spin-space sums.
    #[arg(long, default_value_t = 20)]
    pub max_vertices: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of chain steps.
    #[arg(long, default_value_t = 1000)]
    pub steps: u64,
    /// Record every K-th step.
    #[arg(long, value_name = "K", default_value_t = 1)]
    pub every: u64,
    /// Append the full state to records whose step is a multiple of K.
    #[arg(long, value_name = "K")]
    pub dump_every: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Quantity to estimate: `chi`, or `corr U V` with 1-based labels.
    #[arg(long, num_args = 1..=3, value_names = ["chi|corr", "U", "V"], default_values = ["chi"])]
    pub target: Vec<String>,
    /// Relative error.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Failure probability for a single run.
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// Distance cap for correlations; defaults to d(u, v).
    #[arg(long)]
    pub k: Option<usize>,
    /// Burn-in override.
    #[arg(long)]
    pub tau: Option<u64>,
    /// Sample-count override.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Median trick with 6 ceil(log2(1/eta)) + 1 replicas.
    #[arg(long, conflicts_with = "replicas")]
    pub eta: Option<f64>,
    /// Median trick with an explicit replica count.
    #[arg(long)]
    pub replicas: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpectralArgs {
    #[command(flatten)]
    pub common: Common,
    /// Total-variation thresholds.
    #[arg(long = "delta", value_delimiter = ',', default_values_t = [0.25, 0.01])]
    pub deltas: Vec<f64>,
    /// Largest state space for the dense eigensolver.
    #[arg(long, default_value_t = 50_000)]
    pub max_states: usize,
    /// Cap on total-variation iterations.
    #[arg(long, default_value_t = 10_000_000)]
    pub max_iterations: usize,
}

#[derive(Debug, Args)]
pub struct CongestionArgs {
    #[command(flatten)]
    pub common: Common,
    /// Per-transition loads as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Largest number of (initial, final) pairs to route.
    #[arg(long, default_value_t = 50_000_000)]
    pub budget: usize,
}
