use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "planar-gap",
    version,
    about = "Spectral gap, Cheeger constant, distance and mixing analysis of subdivided binary trees with level paths"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a hat tree and write it out.
    Build(Common),
    /// Smallest non-zero Laplacian eigenvalue.
    Spectrum(Common),
    /// Cheeger constant, exactly or by a sweep cut.
    Cheeger(Common),
    /// Run every certificate for one (h, k); exits 1 if any fails.
    Verify(Common),
    /// Total-variation mixing time of the lazy walk.
    Mixing(MixingArgs),
    /// Diameter and mean squared distances.
    Metrics(MetricsArgs),
    /// One CSV row of summary numbers per height, with k = 2^h.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Edgelist,
    Json,
    Dot,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverArg {
    Auto,
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Exact,
    Sweep,
    Sampled,
    MonteCarlo,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Tree height.
    #[arg(long)]
    pub h: Option<u32>,
    /// Subdivision factor; defaults to 2^h.
    #[arg(long)]
    pub k: Option<u32>,
    /// Read the graph from a file instead of building one.
    #[arg(long = "in", value_name = "PATH")]
    #[serde(rename = "input")]
    pub input: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long, value_name = "PATH")]
    #[serde(rename = "output")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random test functions per randomized check.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Eigenvector residual bound.
    #[arg(long = "tol", default_value_t = 1e-8)]
    #[serde(rename = "tolerance")]
    pub tol: f64,
    /// Total-variation threshold for the mixing time.
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    pub solver: SolverArg,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Operator applications allowed to the iterative solver.
    #[arg(long, default_value_t = 200_000)]
    pub max_iter: usize,
    /// Largest graph handed to the dense solver under `--solver auto`.
    #[arg(long, default_value_t = 2000)]
    pub dense_cutoff: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MixingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Walkers per start for Monte Carlo estimation.
    #[arg(long, default_value_t = 100_000)]
    pub walkers: usize,
    /// Start vertex; by default the worse of the root and the farthest vertex.
    #[arg(long)]
    pub start: Option<usize>,
    /// Where to write the `t,tv` trajectory CSV.
    #[arg(long, value_name = "PATH")]
    pub trajectory: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MetricsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Ordered pairs drawn in sampled mode.
    #[arg(long, default_value_t = 100_000)]
    pub sample_pairs: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 2)]
    pub h_min: u32,
    #[arg(long, default_value_t = 4)]
    pub h_max: u32,
    /// Walkers per start when a row is too large for exact mixing.
    #[arg(long, default_value_t = 100_000)]
    pub walkers: usize,
}
