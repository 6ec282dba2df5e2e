use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qrgg", version, about = "Quasi random geometric graph multicast capacity simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one random topology and write it as graph JSON
    Generate(GenerateArgs),
    /// Exact multicast capacity of a graph file, fixture or fresh topology
    Capacity(CapacityArgs),
    /// Expected cut capacity and concentration bounds
    Bounds(BoundsArgs),
    /// Monte Carlo capacity histogram with optional bound audits
    Experiment(ExperimentArgs),
    /// Mean capacity over a grid of node counts and radii (decay kernel)
    Sweep(SweepArgs),
    /// Random linear network coding check at the multicast capacity
    VerifyRlnc(VerifyRlncArgs),
    /// Convert an experiment result into CSV and SVG files
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Fixed,
    LinearDecay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Fig3,
    Fig4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuditBasisArg {
    Estimate,
    IntervalUpper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureArg {
    Wheatstone,
    Butterfly,
    PathWithChord,
    Diamond,
    SingleRelay,
    OpposingFlows,
}

impl FixtureArg {
    pub fn name(self) -> &'static str {
        match self {
            FixtureArg::Wheatstone => "wheatstone",
            FixtureArg::Butterfly => "butterfly",
            FixtureArg::PathWithChord => "path-with-chord",
            FixtureArg::Diamond => "diamond",
            FixtureArg::SingleRelay => "single-relay",
            FixtureArg::OpposingFlows => "opposing-flows",
        }
    }
}

/// Connection model flags shared by every command that builds topologies.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Guaranteed-connection radius r
    #[arg(long)]
    pub r: Option<f64>,
    /// Outer radius r' beyond which nodes never connect
    #[arg(long = "r-prime")]
    pub r_prime: Option<f64>,
    /// Connection probability inside the annulus (fixed kernel)
    #[arg(long)]
    pub p: Option<f64>,
    /// Annulus connection kernel
    #[arg(long, value_enum, default_value_t = KernelArg::Fixed)]
    pub kernel: KernelArg,
    /// Peak probability of the linear-decay kernel
    #[arg(long = "p-connection")]
    pub p_connection: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of relays
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of terminals
    #[arg(long, default_value_t = 1)]
    pub terminals: usize,
    /// Master seed
    #[arg(long, env = "QRGG_SEED")]
    pub seed: u64,
    /// Output path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// Graph JSON file
    #[arg(long, conflicts_with_all = ["fixture", "n"])]
    pub graph: Option<PathBuf>,
    /// Built-in fixture graph
    #[arg(long, value_enum, conflicts_with = "n")]
    pub fixture: Option<FixtureArg>,
    /// Number of relays for a freshly generated topology
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of terminals for a freshly generated topology
    #[arg(long, default_value_t = 1)]
    pub terminals: usize,
    /// Seed for a freshly generated topology
    #[arg(long, env = "QRGG_SEED")]
    pub seed: Option<u64>,
    /// Output path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Number of relays
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of terminals (tau)
    #[arg(long, default_value_t = 1)]
    pub terminals: usize,
    /// Cut size k for the lower bound
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Monte Carlo pairs for the p' estimate
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Use this p' instead of estimating it
    #[arg(long = "p-prime")]
    pub p_prime: Option<f64>,
    /// Seed for the p' estimate
    #[arg(long, env = "QRGG_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the lower-bound epsilon for every k to this CSV file
    #[arg(long = "epsilon-curve")]
    pub epsilon_curve: Option<PathBuf>,
    /// Output path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Parameter preset; explicit flags override it
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    /// Number of relays
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of terminals
    #[arg(long)]
    pub terminals: Option<usize>,
    /// Number of trials
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    /// Master seed
    #[arg(long, env = "QRGG_SEED")]
    pub seed: u64,
    /// Worker threads (0 uses every core)
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Equal-width histogram bins (unit-width integer bins when absent)
    #[arg(long)]
    pub bins: Option<usize>,
    /// Comma-separated epsilons for the bound audit
    #[arg(long, value_delimiter = ',')]
    pub audit: Vec<f64>,
    /// Comma-separated cut sizes audited besides k = 0
    #[arg(long = "audit-k", value_delimiter = ',')]
    pub audit_k: Vec<usize>,
    /// p' value used by the audit
    #[arg(long = "audit-p-prime", value_enum, default_value_t = AuditBasisArg::Estimate)]
    pub audit_p_prime: AuditBasisArg,
    /// Run one random linear coding trial per topology
    #[arg(long = "rlnc-check")]
    pub rlnc_check: bool,
    /// Monte Carlo pairs for the p' estimate
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Result JSON path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-trial capacity CSV
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Histogram CSV
    #[arg(long = "hist-csv")]
    pub hist_csv: Option<PathBuf>,
    /// Histogram SVG
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated relay counts
    #[arg(long = "n-list", value_delimiter = ',', default_value = "50,100,150,200,250,300")]
    pub n_list: Vec<usize>,
    /// Comma-separated inner radii
    #[arg(long = "r-list", value_delimiter = ',', default_value = "0.05,0.1,0.15")]
    pub r_list: Vec<f64>,
    /// r' = ratio * r
    #[arg(long = "r-prime-ratio", default_value_t = 1.8, conflicts_with_all = ["r_prime_offset", "r_prime_list"])]
    pub r_prime_ratio: f64,
    /// r' = r + offset
    #[arg(long = "r-prime-offset", conflicts_with = "r_prime_list")]
    pub r_prime_offset: Option<f64>,
    /// Comma-separated r' values, one per r
    #[arg(long = "r-prime-list", value_delimiter = ',')]
    pub r_prime_list: Option<Vec<f64>>,
    /// Peak probability of the linear-decay kernel
    #[arg(long = "p-connection", default_value_t = 0.9)]
    pub p_connection: f64,
    /// Number of terminals
    #[arg(long, default_value_t = 1)]
    pub terminals: usize,
    /// Trials per cell
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Master seed shared by every cell
    #[arg(long, env = "QRGG_SEED")]
    pub seed: u64,
    /// Worker threads (0 uses every core)
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Monte Carlo pairs for each cell's p' estimate
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Output path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyRlncArgs {
    /// Graph JSON file
    #[arg(long, required_unless_present = "fixture", conflicts_with = "fixture")]
    pub graph: Option<PathBuf>,
    /// Built-in fixture graph
    #[arg(long, value_enum)]
    pub fixture: Option<FixtureArg>,
    /// Random codes to draw
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Seed for the coefficient draws
    #[arg(long, env = "QRGG_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Experiment result JSON
    #[arg(long)]
    pub result: PathBuf,
    /// Per-trial capacity CSV
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Histogram CSV
    #[arg(long = "hist-csv")]
    pub hist_csv: Option<PathBuf>,
    /// Histogram SVG
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// SVG title (derived from the result when absent)
    #[arg(long)]
    pub title: Option<String>,
}
