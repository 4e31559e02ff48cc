use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Second-order ergodic averages for non-primitive substitutions.
///
/// Exit codes: 0 success, 1 other error, 2 inadmissible substitution, 3 density brackets
/// too wide at the depth cap, 4 coverage shortfall (orbit or patch too short), 64 usage.
#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[command(name = "subergo", version)]
pub struct Cli {
    /// Substitution config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Output directory. Without it the main table or report goes to standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Command {
    /// Admissibility report and spectral summary.
    Analyze {
        /// Largest power searched for an interior B-letter.
        #[arg(long, default_value_t = 8)]
        tec2_max_k: usize,
    },
    /// Average density of the natural measure on the attractor.
    Density(DensityArgs),
    /// Log-averaged normalized ergodic sums.
    SecondOrder(SecondOrderArgs),
    /// α-dimensional frequency of a B-letter.
    Frequency(FrequencyArgs),
    /// Logarithmic frequency of a letter.
    Logfreq(LogfreqArgs),
    /// Distribution of ρ(B)^-n S f over random orbits.
    Distribution(DistributionArgs),
    /// Re-run the command recorded in a manifest.
    Replay {
        manifest: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Pointwise,
    Birkhoff,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowArg {
    Ball,
    Right,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    /// Log-time horizon in units of log λ.
    #[arg(long, default_value_t = 40)]
    pub k: usize,
    #[arg(long, default_value_t = 64)]
    pub replicas: usize,
    /// Attractor points averaged per replica.
    #[arg(long)]
    pub points: Option<usize>,
    /// Cylinder levels below the zoom level used by the brackets.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, value_enum)]
    pub window: Option<WindowArg>,
    /// Log-time step of the trapezoid rule.
    #[arg(long)]
    pub step: Option<f64>,
    /// Largest tolerated mean relative bracket half-width.
    #[arg(long)]
    pub max_width: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartArg {
    /// ν-random orbits, one RNG stream per sample.
    Random,
    /// The one-sided fixed point.
    Fixed,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineArg {
    Symbolic,
    Tiling,
}

/// Density constant: a value or a JSON file with a top-level `c_hat`.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantArgs {
    #[arg(long, conflicts_with = "c_file")]
    pub c: Option<f64>,
    #[arg(long)]
    pub c_file: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitArgs {
    #[arg(long, value_enum, default_value_t = StartArg::Random)]
    pub start: StartArg,
    /// Number of random orbits (or tiles) averaged.
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderArgs {
    /// Largest index (1-D).
    #[arg(long)]
    pub n: Option<usize>,
    /// Largest radius (2-D, or the 1-D tiling engine).
    #[arg(long = "R", alias = "radius")]
    pub r: Option<f64>,
    #[command(flatten)]
    pub constant: ConstantArgs,
    /// Observable: `b` (B-letter indicator), `hausdorff`, `zero`, or `label:weight,...`.
    #[arg(long)]
    pub f: Option<String>,
    /// Accept weights on A-letters.
    #[arg(long)]
    pub formal: bool,
    #[arg(long, value_enum, default_value_t = EngineArg::Symbolic)]
    pub engine: EngineArg,
    #[command(flatten)]
    pub orbit: OrbitArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyArgs {
    #[arg(long)]
    pub b: String,
    #[arg(long, default_value_t = 531_441)]
    pub n: usize,
    #[command(flatten)]
    pub constant: ConstantArgs,
    #[command(flatten)]
    pub orbit: OrbitArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogfreqArgs {
    #[arg(long)]
    pub a: String,
    #[arg(long, default_value_t = 531_441)]
    pub n: usize,
    #[command(flatten)]
    pub orbit: OrbitArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionArgs {
    #[arg(long, default_value_t = 8)]
    pub levels: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Observable, as for second-order.
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub formal: bool,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Density(_) => "density",
            Command::SecondOrder(_) => "second-order",
            Command::Frequency(_) => "frequency",
            Command::Logfreq(_) => "logfreq",
            Command::Distribution(_) => "distribution",
            Command::Replay { .. } => "replay",
        }
    }
}
