use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "stardisc", version, about = "Discrepancy of point sets: exact values, bounds and applications")]
pub struct Cli {
    /// Emit the report as JSON; randomized commands then require --seed.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a point set.
    Gen(GenArgs),
    /// Evaluate a discrepancy measure of a point set.
    Disc(DiscArgs),
    /// Reduce the support of a discrete measure.
    Reduce(ReduceArgs),
    /// Search digit permutations for a generalized Halton sequence.
    OptimizePerms(PermArgs),
    /// Evaluate measures on the point sets listed in a JSON manifest.
    Report(ReportArgs),
    /// Cross-check the algorithms against each other.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenType {
    Halton,
    Ghalton,
    Lattice,
    Midpoint,
    Domset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scramble {
    Random,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Path,
    Cycle,
    Star,
    Complete,
    Random,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long = "type", value_enum)]
    pub kind: GenType,
    /// Number of points, or of graph vertices for `domset`.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Lattice generating vector, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub z: Vec<i64>,
    #[arg(long, value_enum, default_value_t = Scramble::Random)]
    pub scramble: Scramble,
    #[arg(long, value_enum, default_value_t = GraphKind::Path)]
    pub graph: GraphKind,
    #[arg(long, default_value_t = 0.5)]
    pub edge_prob: f64,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the points here and print a report instead of the points.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureName {
    StarLinf,
    StarL2,
    ExtremeL2,
    ModifiedL2,
    WeightedL2,
    LpEven,
    CoverUpper,
    TaLower,
    GaLower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Basic,
    Improved,
}

#[derive(Debug, Args)]
pub struct DiscArgs {
    /// Point-set file, `-` for standard input.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub measure: MeasureName,
    /// `auto|1d|2d|3d|grid|dem` for star-linf, `warnock|stable|fast` for star-l2.
    #[arg(long)]
    pub method: Option<String>,
    /// Marginal distribution functions for the G-discrepancy (star-linf).
    #[arg(long)]
    pub gstar: Option<PathBuf>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub p: Option<u32>,
    /// Product weights, comma separated; a single value applies to every axis.
    #[arg(long, value_delimiter = ',')]
    pub gamma: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Variant::Improved)]
    pub variant: Variant,
    #[arg(long, default_value_t = 10_000)]
    pub iterations: u64,
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 20)]
    pub mu: usize,
    #[arg(long, default_value_t = 20)]
    pub lambda_c: usize,
    #[arg(long, default_value_t = 20)]
    pub lambda_m: usize,
    #[arg(long, default_value_t = 50)]
    pub stagnation: usize,
    /// Work budget for exact computations.
    #[arg(long, default_value_t = stardisc::exact::DEFAULT_BUDGET)]
    pub budget: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Selection {
    Forward,
    Backward,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Selection::Forward)]
    pub method: Selection,
    /// Solve a linear program for the kept weights instead of nearest-atom
    /// aggregation.
    #[arg(long)]
    pub exact_inner: bool,
    #[arg(long, default_value_t = stardisc::applications::DEFAULT_SCENARIO_BUDGET)]
    pub budget: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PermArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub points: usize,
    #[arg(long, default_value_t = 20)]
    pub mu: usize,
    #[arg(long, default_value_t = 40)]
    pub lambda: usize,
    #[arg(long, default_value_t = 50)]
    pub generations: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write one line `p: π(0) … π(p-1)` per base.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub instances: usize,
}
