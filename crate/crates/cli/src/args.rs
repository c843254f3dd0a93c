use std::path::PathBuf;

use blcband::bands::{BandKind, DEFAULT_NU};
use blcband::dist::{mixture_normal, sine_density, AnalyticDist};
use blcband::grid::{DEFAULT_FILL, DEFAULT_MARGIN_FRAC};
use blcband::sim::KAPPA_REPS;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "blcband", version, about = "Confidence bands for distribution functions under bi-log-concavity")]
pub struct Cli {
    #[command(subcommand)]
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Compute a confidence band from data and refine it.
    Band(BandArgs),
    /// Check bi-log-concavity of an analytic distribution.
    Check(CheckArgs),
    /// Bounds on MGF, moments and hazards from a band file.
    Functionals(FunctionalsArgs),
    /// Monte Carlo critical value of a band statistic.
    Quantile(QuantileArgs),
    /// Coverage or consistency simulation.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BandChoice {
    Ks,
    Wks,
    Odw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    None,
    Log10,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BandOpts {
    /// Band construction.
    #[arg(long = "band", value_enum, default_value_t = BandChoice::Ks)]
    pub band: BandChoice,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Weight exponent of the weighted KS band.
    #[arg(long, default_value_t = 0.4)]
    pub gamma: f64,
    /// Shape parameter of the likelihood-ratio band.
    #[arg(long, default_value_t = DEFAULT_NU)]
    pub nu: f64,
}

impl BandOpts {
    pub fn kind(&self) -> BandKind {
        match self.band {
            BandChoice::Ks => BandKind::Ks,
            BandChoice::Wks => BandKind::Wks { gamma: self.gamma },
            BandChoice::Odw => BandKind::Odw { nu: self.nu },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Normal,
    Logistic,
    Exponential,
    Mixture,
    Sine,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DistOpts {
    #[arg(long = "dist", value_enum, default_value_t = Family::Normal)]
    pub family: Family,
    /// Mixture half-separation.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Sine frequency.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Sine amplitude.
    #[arg(long = "amp", default_value_t = 0.05)]
    pub amp: f64,
}

impl DistOpts {
    pub fn dist(&self) -> blcband::Result<AnalyticDist> {
        match self.family {
            Family::Normal => Ok(AnalyticDist::Normal),
            Family::Logistic => Ok(AnalyticDist::Logistic),
            Family::Exponential => Ok(AnalyticDist::Exponential),
            Family::Mixture => mixture_normal(self.delta),
            Family::Sine => sine_density(self.k, self.amp),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BandArgs {
    /// Observations, one per line, or two columns `lower,upper` per line.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub band: BandOpts,
    #[arg(long, default_value_t = DEFAULT_FILL)]
    pub grid_fill: usize,
    #[arg(long, default_value_t = DEFAULT_MARGIN_FRAC)]
    pub margin: f64,
    #[arg(long, value_enum, default_value_t = Transform::None)]
    pub transform: Transform,
    /// Observations are only known to lie within +- this offset.
    #[arg(long, default_value_t = 0.0)]
    pub censor_offset: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Replications for calibrating the critical value.
    #[arg(long, default_value_t = KAPPA_REPS)]
    pub reps: usize,
    /// Use this critical value instead of calibrating one.
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    #[command(flatten)]
    pub dist: DistOpts,
    /// Left end of the scan; defaults to the family's usual range.
    #[arg(long, allow_negative_numbers = true, requires = "to")]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "from")]
    pub to: Option<f64>,
    #[arg(long, default_value_t = blcband::blc_check::VERDICT_GRID_POINTS)]
    pub points: usize,
    #[arg(long, default_value_t = blcband::blc_check::DEFAULT_SLACK)]
    pub slack: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FunctionalsArgs {
    /// Band file written by `blcband band`.
    #[arg(long)]
    pub band_input: PathBuf,
    /// Use the raw band columns instead of the refined ones.
    #[arg(long)]
    pub raw: bool,
    /// MGF arguments.
    #[arg(long = "t", value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Vec<f64>,
    /// Moment orders.
    #[arg(long = "moments", value_delimiter = ',', default_value = "1,2")]
    pub moments: Vec<u32>,
    /// Center of the moments.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center: f64,
    /// Points at which to bound the hazard and reverse hazard.
    #[arg(long = "hazard-x", value_delimiter = ',', allow_hyphen_values = true)]
    pub hazard_x: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QuantileArgs {
    #[command(flatten)]
    pub band: BandOpts,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = KAPPA_REPS)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub dist: DistOpts,
    #[command(flatten)]
    pub band: BandOpts,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Run a consistency table over these sample sizes instead of a
    /// coverage study at `--n`.
    #[arg(long, value_delimiter = ',')]
    pub consistency: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}
