use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orthohom::mc::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(name = "orthohom", version, about = "Ortho-homomorphism densities of graphs on spheres")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,

    /// Append a JSON-lines run record to this file.
    #[arg(long, global = true)]
    pub log: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Test d-sparsity and print a witness when it fails.
    Sparsity(GraphArgs),
    /// Theorem-based finiteness verdict for t(G,d).
    Finiteness(GraphArgs),
    /// Compute or estimate t(G,d).
    Density(DensityArgs),
    /// Draw random ortho-homomorphisms with their importance weights.
    Sample(SampleArgs),
    /// Zonal eigenvalues and multiplicities.
    SpectralTable(SpectralArgs),
    /// Run the cross-engine acceptance suite.
    Verify(VerifyArgs),
    /// Compare Monte Carlo determinant moments with exact values.
    Moments(MomentArgs),
    /// Re-run density records from a log and compare results.
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Graph file (text edge list or JSON).
    #[arg(long)]
    pub graph: PathBuf,
    /// Sphere dimension d (vectors live in R^d).
    #[arg(long)]
    pub dim: usize,
}

#[derive(Args, Debug, Clone)]
pub struct McArgs {
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Auto,
    Closed,
    Spectral,
    McSeq,
    McBip,
    Graphon,
}

impl MethodChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodChoice::Auto => "auto",
            MethodChoice::Closed => "closed",
            MethodChoice::Spectral => "spectral",
            MethodChoice::McSeq => "mc-seq",
            MethodChoice::McBip => "mc-bip",
            MethodChoice::Graphon => "graphon",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        <MethodChoice as ValueEnum>::from_str(s, false).ok()
    }
}

#[derive(Args, Debug, Clone)]
pub struct DensityArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = MethodChoice::Auto)]
    pub method: MethodChoice,
    #[command(flatten)]
    pub mc: McArgs,
    /// Node ordering: default, random, or a file listing a permutation.
    #[arg(long, default_value = "default")]
    pub order: String,
    /// Cap radius for the graphon method.
    #[arg(long, default_value_t = 0.1)]
    pub radius: f64,
    /// Inner samples per cap average for the graphon method.
    #[arg(long, default_value_t = 1000)]
    pub inner: usize,
    /// Target tail bound for spectral series.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Number of configurations to draw.
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "default")]
    pub order: String,
}

#[derive(Args, Debug, Clone)]
pub struct SpectralArgs {
    #[arg(long)]
    pub dim: usize,
    /// Largest harmonic degree listed.
    #[arg(long, default_value_t = 10)]
    pub max_degree: usize,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Reduced sample budgets for a fast smoke run.
    #[arg(long)]
    pub quick: bool,
    /// Comma-separated check numbers to run (default: all).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Args, Debug, Clone)]
pub struct MomentArgs {
    #[arg(long)]
    pub dim: usize,
    /// Number of points; all of 2..d-1 when omitted.
    #[arg(long)]
    pub points: Option<usize>,
    /// Exponent; each of -1, 1, 2 when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub power: Option<i64>,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ReplayArgs {
    /// JSON-lines log written with --log.
    #[arg(long)]
    pub from: PathBuf,
}
