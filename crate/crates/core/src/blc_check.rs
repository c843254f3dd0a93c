//! Bi-log-concavity checks for analytic distributions.
//!
//! Two equivalent characterizations are checked on a grid inside `J(F)`:
//! the second-derivative sandwich `-f²/(1-F) <= f' <= f²/F`, and
//! monotonicity of the hazard `f/(1-F)` (non-decreasing) and reverse hazard
//! `f/F` (non-increasing).

use serde::{Deserialize, Serialize};

use crate::dist::AnalyticDist;
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Default relative slack of both checks.
pub const DEFAULT_SLACK: f64 = 1e-8;
/// Points of the default verdict grid.
pub const VERDICT_GRID_POINTS: usize = 2001;
/// `F` must lie in `(EDGE, 1 - EDGE)` at every verdict grid point.
pub const EDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub x: f64,
    /// Signed distance to the nearest admissible value (negative).
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub first_violation: Option<Violation>,
    pub points: usize,
}

impl Verdict {
    fn from_first(first: Option<Violation>, points: usize) -> Self {
        Self {
            pass: first.is_none(),
            first_violation: first,
            points,
        }
    }
}

/// Equispaced grid on `[a, b]` restricted to points with `EDGE < F < 1 - EDGE`.
pub fn verdict_grid_on(dist: &AnalyticDist, a: f64, b: f64, points: usize) -> Result<Grid> {
    let full = Grid::linspace(a, b, points)?;
    let kept: Vec<f64> = full
        .points()
        .iter()
        .copied()
        .filter(|&x| dist.cdf(x) > EDGE && dist.sf(x) > EDGE)
        .collect();
    if kept.len() < 2 {
        return Err(Error::InvalidGrid("fewer than two points inside J(F)".into()));
    }
    Grid::new(kept)
}

/// Default verdict grid: 2001 points over the family's support hint.
pub fn verdict_grid(dist: &AnalyticDist) -> Result<Grid> {
    let (a, b) = dist.support_hint();
    verdict_grid_on(dist, a, b, VERDICT_GRID_POINTS)
}

fn interior_values(dist: &AnalyticDist, x: f64) -> Result<(f64, f64, f64, f64)> {
    let (cdf, sf) = (dist.cdf(x), dist.sf(x));
    if !(cdf > 0.0 && sf > 0.0) {
        return Err(Error::DegenerateCdf(x));
    }
    Ok((cdf, sf, dist.pdf(x), dist.pdf_deriv(x)))
}

/// `-f²/(1-F) - s <= f' <= f²/F + s` with `s = slack (1 + |f'|)`.
pub fn check_blc_iv(dist: &AnalyticDist, grid: &Grid, slack: f64) -> Result<Verdict> {
    let mut first = None;
    for &x in grid.points() {
        let (cdf, sf, f, fp) = interior_values(dist, x)?;
        let s = slack * (1.0 + fp.abs());
        let upper = f * f / cdf + s - fp;
        let lower = fp + f * f / sf + s;
        let margin = upper.min(lower);
        if margin < 0.0 && first.is_none() {
            first = Some(Violation { x, margin });
        }
    }
    Ok(Verdict::from_first(first, grid.len()))
}

/// Hazard non-decreasing and reverse hazard non-increasing between
/// consecutive grid points, up to `slack (1 + |h|)` per step.
pub fn check_blc_iii(dist: &AnalyticDist, grid: &Grid, slack: f64) -> Result<Verdict> {
    let mut first = None;
    let mut prev: Option<(f64, f64)> = None;
    for &x in grid.points() {
        let (cdf, sf, f, _) = interior_values(dist, x)?;
        let (hazard, reverse) = (f / sf, f / cdf);
        if let Some((h0, r0)) = prev {
            let up = hazard - h0 + slack * (1.0 + h0.abs());
            let down = r0 - reverse + slack * (1.0 + r0.abs());
            let margin = up.min(down);
            if margin < 0.0 && first.is_none() {
                first = Some(Violation { x, margin });
            }
        }
        prev = Some((hazard, reverse));
    }
    Ok(Verdict::from_first(first, grid.len()))
}

/// Bounds `(upper, lower)` on `F(x + t)` implied by bi-log-concavity:
/// `F(x) exp(t f/F)` and `1 - (1 - F(x)) exp(-t f/(1-F))`.
pub fn blc_bounds_ii(dist: &AnalyticDist, x: f64, t: f64) -> Result<(f64, f64)> {
    let (cdf, sf, f, _) = interior_values(dist, x)?;
    let upper = cdf * (t * f / cdf).exp();
    let lower = 1.0 - sf * (-t * f / sf).exp();
    Ok((upper, lower))
}

/// Largest `a` on the scan `step, 2 step, ...` below 1 for which the sine
/// family with `k` modes passes [`check_blc_iv`], stopping at the first
/// failure. An empirical threshold only.
pub fn sine_blc_threshold(k: u32, step: f64) -> Result<f64> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::OutOfRange(format!("step = {step}")));
    }
    let mut best = 0.0;
    let mut a = step;
    while a < 1.0 {
        let d = crate::dist::sine_density(k, a)?;
        if !check_blc_iv(&d, &verdict_grid(&d)?, DEFAULT_SLACK)?.pass {
            break;
        }
        best = a;
        a += step;
    }
    Ok(best)
}
