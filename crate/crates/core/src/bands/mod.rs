//! Empirical distribution function and unconstrained confidence bands.
//!
//! Three constructions are provided: the Kolmogorov-Smirnov band, a weighted
//! KS band indexed by `gamma`, and the likelihood-ratio band built from the
//! binomial KL divergence with additive weights. Each one is the inversion
//! of a distribution-free statistic of uniform order statistics; the matching
//! statistics and Monte Carlo critical values live in [`quantile`].

pub mod kl;
pub mod quantile;

use serde::{Deserialize, Serialize};

use crate::band::BandFn;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::sample::{count_le, Sample};

pub use kl::{kl_bernoulli, kl_invert, odw_weights, Side};
pub use quantile::{massart_kappa, mc_quantile, odw_statistic, wks_statistic, ks_statistic};

/// Default `nu` of the likelihood-ratio band.
pub const DEFAULT_NU: f64 = 3.0;

/// Which unconstrained band, with its shape parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BandKind {
    Ks,
    Wks { gamma: f64 },
    Odw { nu: f64 },
}

impl BandKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BandKind::Ks => Ok(()),
            BandKind::Wks { gamma } if (0.0..0.5).contains(&gamma) => Ok(()),
            BandKind::Wks { gamma } => Err(Error::OutOfRange(format!("gamma = {gamma} not in [0, 0.5)"))),
            BandKind::Odw { nu } if nu > 2.0 && nu.is_finite() => Ok(()),
            BandKind::Odw { nu } => Err(Error::OutOfRange(format!("nu = {nu} must exceed 2"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BandKind::Ks => "ks",
            BandKind::Wks { .. } => "wks",
            BandKind::Odw { .. } => "odw",
        }
    }
}

/// A band construction together with its level and critical value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub kind: BandKind,
    pub alpha: f64,
    pub kappa: f64,
}

impl BandSpec {
    pub fn new(kind: BandKind, alpha: f64, kappa: f64) -> Result<Self> {
        let spec = Self { kind, alpha, kappa };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.kind.validate()?;
        check_alpha(self.alpha)?;
        if !self.kappa.is_finite() {
            return Err(Error::OutOfRange(format!("kappa = {}", self.kappa)));
        }
        Ok(())
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 0.5 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("alpha = {alpha} not in (0, 0.5]")))
    }
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn eval(&self, x: f64) -> f64 {
        count_le(&self.sorted, x) as f64 / self.sorted.len() as f64
    }

    pub fn on_grid(&self, grid: &Grid) -> Vec<f64> {
        grid.points().iter().map(|&t| self.eval(t)).collect()
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

pub fn ecdf(sample: &Sample) -> Result<Ecdf> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(Ecdf {
        sorted: sample.sorted(),
    })
}

/// Band value as a function of the number of order statistics `<= x`.
///
/// `lower[i]` applies on `[X_(i), X_(i+1))` computed from the lower-side
/// order statistics and `upper[i]` on the same interval of the upper-side
/// order statistics.
struct CountTable {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl CountTable {
    /// Smallest non-decreasing majorant of the lower table and largest
    /// non-decreasing minorant of the upper one. For a monotone `F` this
    /// leaves the coverage event unchanged.
    fn monotone_hull(mut self) -> Self {
        for i in 1..self.lower.len() {
            self.lower[i] = self.lower[i].max(self.lower[i - 1]);
        }
        for i in (0..self.upper.len() - 1).rev() {
            self.upper[i] = self.upper[i].min(self.upper[i + 1]);
        }
        self
    }

    fn on_grid(&self, sample: &Sample, grid: &Grid) -> Result<BandFn> {
        let lo_pts = sample.sorted_for_lower();
        let up_pts = sample.sorted_for_upper();
        let mut lower = Vec::with_capacity(grid.len());
        let mut upper = Vec::with_capacity(grid.len());
        for &t in grid.points() {
            lower.push(self.lower[count_le(&lo_pts, t)]);
            upper.push(self.upper[count_le(&up_pts, t)]);
        }
        BandFn::new(grid.clone(), lower, upper)
    }
}

/// `[F_n - kappa/sqrt(n), F_n + kappa/sqrt(n)] ∩ [0, 1]` on the grid.
pub fn ks_band(sample: &Sample, grid: &Grid, kappa: f64) -> Result<BandFn> {
    let n = sample.len();
    let half = kappa / (n as f64).sqrt();
    let table = CountTable {
        lower: (0..=n).map(|i| (i as f64 / n as f64 - half).max(0.0)).collect(),
        upper: (0..=n).map(|i| (i as f64 / n as f64 + half).min(1.0)).collect(),
    };
    table.monotone_hull().on_grid(sample, grid)
}

/// Weighted KS band: on `[X_(i), X_(i+1))` the band is
/// `[t_i - c w(t_i), t_{i+1} + c w(t_{i+1})] ∩ [0, 1]` with `t_i = i/(n+1)`,
/// `w(t) = (t(1-t))^gamma` and `c = kappa/sqrt(n)`. The boundary intervals
/// `i = 0` and `i = n` have lower 0 and upper 1 respectively.
pub fn wks_band(sample: &Sample, grid: &Grid, kappa: f64, gamma: f64) -> Result<BandFn> {
    BandKind::Wks { gamma }.validate()?;
    let n = sample.len();
    let c = kappa / (n as f64).sqrt();
    let t = |i: usize| i as f64 / (n + 1) as f64;
    let w = |t: f64| (t * (1.0 - t)).powf(gamma);
    let lower = (0..=n)
        .map(|i| if i == 0 { 0.0 } else { (t(i) - c * w(t(i))).clamp(0.0, 1.0) })
        .collect();
    let upper = (0..=n)
        .map(|i| if i == n { 1.0 } else { (t(i + 1) + c * w(t(i + 1))).clamp(0.0, 1.0) })
        .collect();
    CountTable { lower, upper }.monotone_hull().on_grid(sample, grid)
}

/// Threshold `(C(t) + nu D(t) + kappa) / (n + 1)` of the likelihood-ratio band.
pub fn odw_threshold(t: f64, n: usize, nu: f64, kappa: f64) -> Result<f64> {
    let (c, d) = odw_weights(t)?;
    Ok((c + nu * d + kappa) / (n + 1) as f64)
}

/// Likelihood-ratio band obtained by inverting `K(t_j, p) <= gamma_n(t_j)`.
pub fn odw_band(sample: &Sample, grid: &Grid, kappa: f64, nu: f64) -> Result<BandFn> {
    BandKind::Odw { nu }.validate()?;
    let n = sample.len();
    let t = |i: usize| i as f64 / (n + 1) as f64;
    let mut lower = vec![0.0; n + 1];
    let mut upper = vec![1.0; n + 1];
    for j in 1..=n {
        let level = odw_threshold(t(j), n, nu, kappa)?;
        lower[j] = kl_invert(t(j), level, Side::Lower);
        upper[j - 1] = kl_invert(t(j), level, Side::Upper);
    }
    CountTable { lower, upper }.monotone_hull().on_grid(sample, grid)
}

/// Builds the band described by `spec` on `grid`.
pub fn build_band(sample: &Sample, grid: &Grid, spec: &BandSpec) -> Result<BandFn> {
    spec.validate()?;
    match spec.kind {
        BandKind::Ks => ks_band(sample, grid, spec.kappa),
        BandKind::Wks { gamma } => wks_band(sample, grid, spec.kappa, gamma),
        BandKind::Odw { nu } => odw_band(sample, grid, spec.kappa, nu),
    }
}
