//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{IRange, PGrid};
use crate::table::Format;

#[derive(Debug, Parser)]
#[command(
    name = "randsub",
    version,
    about = "Exact and simulated statistics of random substitution sequences"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t, global = true)]
    pub format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Largest support length k^i + 1 of an exact distribution.
    #[arg(long, env = "RANDSUB_SUPPORT_CAP", global = true)]
    pub support_cap: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact distribution of the number of ones.
    Dist(DistArgs),
    /// Closed-form moments over a p grid.
    Moments(GridArgs),
    /// Mean entropy, its increment and entropy per digit.
    Entropy(GridArgs),
    /// Entropy-variance curves and their farthest points.
    Hvar(GridArgs),
    /// Variance argmax per iteration and the fitted root curve.
    Extrema(ExtremaArgs),
    /// Monte Carlo ensembles, or a single sequence from a preset rule.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PArgs {
    /// A single substitution probability.
    #[arg(long, conflicts_with = "p_grid")]
    pub p: Option<f64>,
    /// Inclusive grid start:stop:step.
    #[arg(long)]
    pub p_grid: Option<PGrid>,
}

impl PArgs {
    pub fn grid(&self, default: Option<&str>) -> Result<PGrid, String> {
        match (&self.p, &self.p_grid, default) {
            (Some(p), _, _) => PGrid::single(*p),
            (None, Some(g), _) => Ok(g.clone()),
            (None, None, Some(d)) => d.parse(),
            (None, None, None) => Err("one of --p or --p-grid is required".into()),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct IArgs {
    /// A single iteration.
    #[arg(long, conflicts_with = "i_range")]
    pub i: Option<u32>,
    /// Inclusive iteration range first:last.
    #[arg(long)]
    pub i_range: Option<IRange>,
}

impl IArgs {
    pub fn range(&self, default: Option<IRange>) -> Result<IRange, String> {
        match (self.i, self.i_range, default) {
            (Some(i), _, _) => Ok(IRange::single(i)),
            (None, Some(r), _) => Ok(r),
            (None, None, Some(d)) => Ok(d),
            (None, None, None) => Err("one of --i or --i-range is required".into()),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    /// Substitution length.
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[command(flatten)]
    pub iterations: IArgs,
    #[command(flatten)]
    pub probability: PArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Substitution length.
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[command(flatten)]
    pub iterations: IArgs,
    /// Defaults to 0:1:0.01.
    #[command(flatten)]
    pub probability: PArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExtremaArgs {
    /// Substitution lengths to fit, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub k: Vec<u32>,
    /// Iterations entering the fit.
    #[arg(long, default_value = "2:40")]
    pub i_range: IRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Mode {
    /// Track only the number of ones.
    #[default]
    Count,
    /// Materialise every sequence.
    Full,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Substitution length.
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// Number of substitution steps.
    #[arg(long, default_value_t = 7)]
    pub i: u32,
    /// Substitution probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Number of realisations.
    #[arg(long, default_value_t = 1000)]
    pub runs: u64,
    /// Ensemble seed; run r draws from stream r of this seed.
    #[arg(long, env = "RANDSUB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t)]
    pub mode: Mode,
    /// Print one sequence from a named rule: cantor, morse_thue, fibonacci or
    /// mandelbrot:K:P.
    #[arg(long)]
    pub preset: Option<String>,
    /// Seed symbol for --preset; defaults to the rule's usual one.
    #[arg(long, requires = "preset")]
    pub seed_symbol: Option<u8>,
}
