use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "fairdecomp", version, about = "Fair low-diameter decompositions of planar graphs")]
pub struct Cli {
    /// Master seed. Falls back to FAIRDECOMP_SEED, then 0.
    #[arg(long, global = true, env = "FAIRDECOMP_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; defaults depend on the subcommand and --out extension.
    #[arg(long, global = true)]
    pub format: Option<OutFormat>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
    #[value(name = "edge_list")]
    EdgeList,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph.
    Gen(GenArgs),
    /// Run one decomposition and write its clusters as JSON.
    Decompose(DecomposeArgs),
    /// Estimate separation probabilities over many runs (CSV).
    Estimate(EstimateArgs),
    /// Cluster counts and diameters over many runs (JSON).
    Summarize(SummarizeArgs),
    /// Embed a graph and report its distortion.
    Embed(EmbedArgs),
    /// Exact KPR separation probabilities on a path.
    Oracle(OracleArgs),
    /// Emit the data behind one of the empirical figures.
    Repro(ReproArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKindArg {
    Path,
    Grid,
    Star,
    Counterexample,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub kind: GraphKindArg,
    /// Vertex count for path and star.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub w: Option<usize>,
    #[arg(long)]
    pub h: Option<usize>,
    /// Distance of the marked pair for counterexample graphs.
    #[arg(long)]
    pub d: Option<usize>,
    /// Leaves to hang off r0, r1, r2 of a counterexample, e.g. `625,125,25`.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub stars: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Kpr,
    #[value(name = "kpr_plus")]
    KprPlus,
    Randwts,
    #[value(name = "two_cuts")]
    TwoCuts,
    #[value(name = "rand_radius")]
    RandRadius,
    #[value(name = "mixed_rand_radius")]
    MixedRandRadius,
    #[value(name = "grid_axis")]
    GridAxis,
    Embed,
}

#[derive(Debug, Args)]
pub struct AlgoArgs {
    #[arg(long)]
    pub algo: AlgoArg,
    /// Diameter parameter R.
    #[arg(long = "R", alias = "r")]
    pub r: usize,
    /// KPR phases (kpr_plus defaults to 4).
    #[arg(long)]
    pub phases: Option<usize>,
    /// Second-cut exponent for two_cuts.
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Run the random-weights decomposition before two_cuts.
    #[arg(long)]
    pub prefix: bool,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Grid width/height for grid_axis (inferred from the file otherwise).
    #[arg(long)]
    pub w: Option<usize>,
    #[arg(long)]
    pub h: Option<usize>,
    /// min_id, uniform, adversarial (needs marks in the graph file) or pref:a,b,c.
    #[arg(long, default_value = "min_id")]
    pub roots: String,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub algo: AlgoArgs,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// `edges`, `random:K`, or an explicit list `u-v,u-v,...`.
    #[arg(long, default_value = "edges")]
    pub pairs: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    /// Worker threads (0 = all cores). Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub algo: AlgoArgs,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbedMode {
    /// Random-subset embedding into l2.
    Euclidean,
    /// Token embedding into l1 from m*R sampled decompositions.
    L1,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value_t = EmbedMode::Euclidean)]
    pub mode: EmbedMode,
    /// Sampler for l1 mode.
    #[arg(long, value_enum, default_value_t = AlgoArg::Kpr)]
    pub algo: AlgoArg,
    #[arg(long = "R", alias = "r", default_value_t = 4)]
    pub r: usize,
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "R", alias = "r")]
    pub r: usize,
    #[arg(long, default_value_t = 3)]
    pub phases: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Edge separation histograms for kpr and randwts.
    Gaussian,
    /// Cluster counts normalized by n/R.
    Numclusters,
    /// Maximum cluster diameters as a fraction of R.
    Maxdiam,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    #[arg(long)]
    pub figure: Figure,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long = "R", alias = "r", default_value_t = 5)]
    pub r: usize,
    /// Defaults to 3000 for gaussian and 200 otherwise.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub bin_width: f64,
    /// Root policy; the published experiments pick roots uniformly.
    #[arg(long, default_value = "uniform")]
    pub roots: String,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}
