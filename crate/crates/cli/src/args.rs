//! Command-line surface. Every flag is optional so that unset flags fall
//! through to the config file, then to built-in defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ibfair_core::detect::DetectorSpec;
use ibfair_core::perturb::{Scenario, Target};
use ibfair_core::quality::NmiNorm;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "ibfair",
    version,
    about = "Individual-bias fairness evaluation for community detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic graph with planted communities.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Run one detector on a graph and write its partition.
    Detect(DetectFlags),
    /// Score detectors against ground truth: IB/IB_G, quality, Φ.
    Evaluate(EvaluateFlags),
    /// Perturbation sweeps over a two-community planting.
    Sweep(SweepFlags),
    /// Collect run reports into long-format plot data and SVG scatters.
    Report(ReportFlags),
}

#[derive(Debug, Subcommand)]
pub enum GenerateCommand {
    /// ABCD-style graph: power-law degrees and community sizes, mixing ξ.
    Abcd(AbcdFlags),
    /// Minority/majority planting with Bernoulli edges.
    TwoCommunity(TwoCommunityFlags),
}

/// How node tokens in input files map to indices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ids {
    /// Non-negative integers used directly; `n` is the largest id plus one.
    #[default]
    Integer,
    /// Arbitrary tokens, numbered in order of first appearance.
    Remap,
}

impl From<Ids> for ibfair_core::IdMode {
    fn from(ids: Ids) -> Self {
        match ids {
            Ids::Integer => ibfair_core::IdMode::RawInteger,
            Ids::Remap => ibfair_core::IdMode::Remap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// IB per node and IB_G.
    Ib,
    /// Modularity, NMI, ARI, NF1.
    Quality,
    /// Group fairness Φ for every (property, score).
    Phi,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Ib, Metric::Quality, Metric::Phi];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Abcd,
    TwoCommunity,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON file whose keys mirror the long flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory [default: $IBFAIR_OUT_DIR, else ./ibfair-out].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AbcdFlags {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: Option<usize>,
    /// Degree power-law exponent.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub d_min: Option<usize>,
    #[arg(long)]
    pub d_max: Option<usize>,
    /// Community-size power-law exponent.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub c_min: Option<usize>,
    #[arg(long)]
    pub c_max: Option<usize>,
    /// Target fraction of inter-community edges, in [0, 1].
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub d_max_iter: Option<usize>,
    #[arg(long)]
    pub c_max_iter: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TwoCommunityFlags {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: Option<usize>,
    /// Minority share of the nodes.
    #[arg(long)]
    pub minority: Option<f64>,
    /// Edge probability inside a community [default: min(1, 20/n)].
    #[arg(long)]
    pub intra_p: Option<f64>,
    /// Edge probability across communities [default: min(1, 1/n)].
    #[arg(long)]
    pub inter_p: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DetectFlags {
    /// JSON file whose keys mirror the long flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Edge list to partition.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub ids: Option<Ids>,
    /// `name[:key=value,...]`, e.g. `louvain:resolution=1`.
    #[arg(long)]
    pub detector: Option<DetectorSpec>,
    /// Seed used when the detector spec has none.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Partition file to write [default: <out dir>/partition.txt].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateFlags {
    #[command(flatten)]
    pub common: Common,
    /// Edge list; repeat for a graph list (pair each with --ground-truth).
    #[arg(long = "graph")]
    pub graphs: Vec<PathBuf>,
    /// Ground-truth partition, one per --graph, in the same order.
    #[arg(long = "ground-truth")]
    pub ground_truth: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub ids: Option<Ids>,
    /// Generate graphs instead of reading them; ground truth is the planting.
    #[arg(long, value_enum)]
    pub generate: Option<GeneratorKind>,
    /// Number of generated graphs.
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Generator node count.
    #[arg(long)]
    pub n: Option<usize>,
    /// ABCD mixing parameter.
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub c_min: Option<usize>,
    #[arg(long)]
    pub c_max: Option<usize>,
    /// Two-community minority share.
    #[arg(long)]
    pub minority: Option<f64>,
    /// Detector spec `name[:key=value,...]`; repeatable. `ground_truth`
    /// passes the ground truth through as the prediction.
    #[arg(long = "detector")]
    pub detectors: Vec<DetectorSpec>,
    /// Metric groups to compute [default: all].
    #[arg(long, value_enum, value_delimiter = ',')]
    pub metrics: Vec<Metric>,
    #[arg(long)]
    pub nmi_norm: Option<NmiNorm>,
    /// Cross-check IB against the dense co-occurrence oracle.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub oracle: Option<bool>,
    /// Largest n the oracle will attempt.
    #[arg(long)]
    pub oracle_cap: Option<usize>,
    /// Label for this run in `report` output.
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SweepFlags {
    #[command(flatten)]
    pub common: Common,
    /// Repeatable [default: expand, shrink, change].
    #[arg(long = "scenario")]
    pub scenarios: Vec<Scenario>,
    /// Repeatable [default: minority, majority].
    #[arg(long = "target")]
    pub targets: Vec<Target>,
    /// Comma-separated ascending ratios in [0, 1].
    #[arg(long, value_delimiter = ',', conflicts_with = "steps")]
    pub ratios: Vec<f64>,
    /// Evenly spaced grid 0, 1/steps, ..., 1 [default: 10].
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub minority: Option<f64>,
    #[arg(long)]
    pub intra_p: Option<f64>,
    #[arg(long)]
    pub inter_p: Option<f64>,
    /// Also write one row per run.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub per_run: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ReportFlags {
    #[command(flatten)]
    pub common: Common,
    /// Run-report JSON files written by `evaluate`.
    #[arg(required = false)]
    pub reports: Vec<PathBuf>,
    /// Metrics to plot against IB_G [default: every quality metric and Φ].
    #[arg(long, value_delimiter = ',')]
    pub metrics: Vec<String>,
}
