use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "domainflip", version, about = "Domain dynamics for minimizing quadratic functionals of ±1 spins")]
pub struct Cli {
    /// Worker threads for experiments (affects wall time only).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a connection matrix (and optionally pattern, partition and start files).
    Gen(GenArgs),
    /// Run one minimization on a matrix file.
    Minimize(MinimizeArgs),
    /// Run an experiment protocol and write its CSV table.
    Experiment(ExperimentArgs),
    /// Enumerate local minima (and domain local minima) of a small instance.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["hebbian", "random_symmetric"])))]
pub struct GenArgs {
    /// Block-structured Hebbian matrix from grouped pattern columns.
    #[arg(long)]
    pub hebbian: bool,

    /// Symmetric matrix with entries uniform in [-1, 1).
    #[arg(long)]
    pub random_symmetric: bool,

    /// Number of spins (required for --random-symmetric, or with
    /// --n-groups when --sizes is not given).
    #[arg(long)]
    pub n: Option<usize>,

    /// Number of groups.
    #[arg(long)]
    pub n_groups: Option<usize>,

    /// Comma-separated group sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,

    /// Largest group size when sizes are drawn at random (default: N).
    #[arg(long)]
    pub max_size: Option<usize>,

    /// Pattern dimension M.
    #[arg(long)]
    pub m: Option<usize>,

    /// Distortion probability b in [0, 0.5).
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Matrix output file.
    #[arg(long)]
    pub out: PathBuf,

    /// Also write the pattern matrix.
    #[arg(long)]
    pub pattern_out: Option<PathBuf>,

    /// Also write the cluster partition (one domain per group).
    #[arg(long)]
    pub partition_out: Option<PathBuf>,

    /// Also write a random block-constant start configuration.
    #[arg(long)]
    pub start_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DynamicsKind {
    Random,
    Synchronous,
    Domain,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    #[arg(long)]
    pub matrix: PathBuf,

    #[arg(long, value_enum)]
    pub dynamics: DynamicsKind,

    /// Partition file (required for --dynamics domain).
    #[arg(long)]
    pub partition: Option<PathBuf>,

    /// After domain dynamics converges, continue with random dynamics.
    #[arg(long)]
    pub defrost: bool,

    /// Start configuration file; a uniform random start is drawn from
    /// --seed otherwise.
    #[arg(long)]
    pub start: Option<PathBuf>,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long)]
    pub max_sweeps: Option<usize>,

    /// Write the energy after each accepted flip as CSV.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,

    /// Write the final configuration.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    /// Deepest-minimum frequency per matrix and dynamics at one distortion level.
    Fig1,
    /// Mean deepest-minimum frequency versus distortion.
    Fig2,
    /// Mean r-characteristic of the domain dynamics versus distortion.
    Fig3,
    /// Mean same-group coupling versus distortion.
    Table1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    /// N=300, M=30, 20 groups, k=15, 20 matrices x 200 starts.
    Desk,
    /// N=1000, M=60, 40 groups, k=25, 200 matrices x 1000 starts.
    Full,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub protocol: Protocol,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Baseline parameters; individual flags override them.
    #[arg(long, value_enum, default_value_t = Scale::Desk)]
    pub scale: Scale,

    /// Number of spins N.
    #[arg(long)]
    pub n: Option<usize>,

    /// Pattern dimension M (table1 default: 600).
    #[arg(long)]
    pub m: Option<usize>,

    /// Number of groups (table1 default: 10).
    #[arg(long)]
    pub n_groups: Option<usize>,

    /// Largest group size.
    #[arg(long)]
    pub max_size: Option<usize>,

    /// Group size for table1 (default: 20).
    #[arg(long)]
    pub group_size: Option<usize>,

    /// Comma-separated distortion levels.
    #[arg(long, value_delimiter = ',')]
    pub b: Option<Vec<f64>>,

    /// Domain size for random domains.
    #[arg(long)]
    pub k_random: Option<usize>,

    #[arg(long)]
    pub matrices: Option<usize>,

    #[arg(long)]
    pub starts: Option<usize>,

    /// Output directory for the CSV file.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub matrix: PathBuf,

    /// Also enumerate domain local minima for this partition.
    #[arg(long)]
    pub partition: Option<PathBuf>,

    /// Within-domain reference pattern for the domain enumeration (default: all +1).
    #[arg(long)]
    pub reference: Option<PathBuf>,

    /// Print every minimum, not just the counts.
    #[arg(long)]
    pub list: bool,
}
