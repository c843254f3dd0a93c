//! Refinement of a confidence band to the bi-log-concave class.
//!
//! Alternates two concave-interior steps until the band stops changing:
//! one on `(log L, log U)`, one on `(log(1 - U), log(1 - L))`. Every step
//! intersects the band with a constraint that any bi-log-concave `G` inside
//! it satisfies, so the band only shrinks and contains every such `G`.

use serde::{Deserialize, Serialize};

use crate::band::BandFn;
use crate::concint::{conc_int, ConcIntResult};
use crate::error::{Error, Result};
use crate::grid::Grid;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Largest monotonicity or crossing defect attributed to rounding.
const WOBBLE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RefineResult {
    pub feasible: bool,
    /// Refined band; `None` when no bi-log-concave `G` fits the input.
    pub band: Option<BandFn>,
    pub iterations: usize,
    pub converged: bool,
}

enum Step {
    Done(Vec<f64>, Vec<f64>),
    Infeasible,
}

fn log_or_neg_inf(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Concave-interior step on `(log L, log U)`.
fn log_step(grid: &Grid, lower: &[f64], upper: &[f64]) -> Result<Step> {
    let ell: Vec<f64> = lower.iter().map(|&l| log_or_neg_inf(l)).collect();
    let u: Vec<f64> = upper.iter().map(|&h| log_or_neg_inf(h)).collect();
    if ell.iter().filter(|v| v.is_finite()).count() < 2 {
        return Ok(Step::Done(lower.to_vec(), upper.to_vec()));
    }
    match conc_int(grid, &ell, &u)? {
        ConcIntResult::Infeasible { .. } => Ok(Step::Infeasible),
        ConcIntResult::Feasible(ci) => {
            let lo = ci.lower_on_grid().into_iter().map(f64::exp).collect();
            let hi = ci.upper_on_grid().into_iter().map(f64::exp).collect();
            Ok(Step::Done(lo, hi))
        }
    }
}

/// Concave-interior step on `(log(1 - U), log(1 - L))`.
fn log_complement_step(grid: &Grid, lower: &[f64], upper: &[f64]) -> Result<Step> {
    let ell: Vec<f64> = upper
        .iter()
        .map(|&h| if h < 1.0 { (-h).ln_1p() } else { f64::NEG_INFINITY })
        .collect();
    let u: Vec<f64> = lower
        .iter()
        .map(|&l| if l < 1.0 { (-l).ln_1p() } else { f64::NEG_INFINITY })
        .collect();
    if ell.iter().filter(|v| v.is_finite()).count() < 2 {
        return Ok(Step::Done(lower.to_vec(), upper.to_vec()));
    }
    match conc_int(grid, &ell, &u)? {
        ConcIntResult::Infeasible { .. } => Ok(Step::Infeasible),
        ConcIntResult::Feasible(ci) => {
            let lo = ci.upper_on_grid().into_iter().map(|v| -v.exp_m1()).collect();
            let hi = ci.lower_on_grid().into_iter().map(|v| -v.exp_m1()).collect();
            Ok(Step::Done(lo, hi))
        }
    }
}

/// Absorbs rounding after a step: restores monotonicity, nesting in the
/// previous band and `L <= U`. Defects above `WOBBLE` are reported.
fn tidy(mut lo: Vec<f64>, mut hi: Vec<f64>, prev_lo: &[f64], prev_hi: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = lo.len();
    for i in 0..m {
        lo[i] = lo[i].clamp(0.0, 1.0);
        hi[i] = hi[i].clamp(0.0, 1.0);
    }
    for i in 1..m {
        if lo[i] < lo[i - 1] {
            if lo[i - 1] - lo[i] > WOBBLE {
                return Err(Error::Internal(format!(
                    "refined lower boundary decreases by {} at index {i}",
                    lo[i - 1] - lo[i]
                )));
            }
            lo[i] = lo[i - 1];
        }
    }
    for i in (0..m - 1).rev() {
        if hi[i] > hi[i + 1] {
            if hi[i] - hi[i + 1] > WOBBLE {
                return Err(Error::Internal(format!(
                    "refined upper boundary decreases by {} at index {}",
                    hi[i] - hi[i + 1],
                    i + 1
                )));
            }
            hi[i] = hi[i + 1];
        }
    }
    for i in 0..m {
        lo[i] = lo[i].max(prev_lo[i]);
        hi[i] = hi[i].min(prev_hi[i]);
        if lo[i] > hi[i] {
            if lo[i] - hi[i] > WOBBLE {
                return Err(Error::Internal(format!(
                    "refined boundaries cross by {} at index {i}",
                    lo[i] - hi[i]
                )));
            }
            let mid = (0.5 * (lo[i] + hi[i])).clamp(prev_lo[i], prev_hi[i]);
            lo[i] = mid;
            hi[i] = mid;
        }
    }
    Ok((lo, hi))
}

fn sup_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Refines `band` to the pointwise infimum and supremum of bi-log-concave
/// distribution functions inside it, as far as the alternating iteration
/// reaches in `max_iter` passes.
///
/// The input must satisfy `L < 1` and `U > 0`. Infeasibility means that no
/// bi-log-concave `G` satisfies `L <= G <= U` on the grid.
pub fn refine_blc(band: &BandFn, max_iter: usize, tol: f64) -> Result<RefineResult> {
    if max_iter < 1 {
        return Err(Error::OutOfRange("max_iter must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tol = {tol}")));
    }
    band.check_strict()?;
    let grid = band.grid();
    let mut lo = band.lower().to_vec();
    let mut hi = band.upper().to_vec();
    let infeasible = |iterations| RefineResult {
        feasible: false,
        band: None,
        iterations,
        converged: true,
    };

    for iter in 1..=max_iter {
        let (l1, h1) = match log_step(grid, &lo, &hi)? {
            Step::Done(l, h) => tidy(l, h, &lo, &hi)?,
            Step::Infeasible => return Ok(infeasible(iter)),
        };
        let (l2, h2) = match log_complement_step(grid, &l1, &h1)? {
            Step::Done(l, h) => tidy(l, h, &l1, &h1)?,
            Step::Infeasible => return Ok(infeasible(iter)),
        };
        let change = sup_change(&l2, &lo).max(sup_change(&h2, &hi));
        lo = l2;
        hi = h2;
        if change <= tol {
            return Ok(RefineResult {
                feasible: true,
                band: Some(BandFn::new(grid.clone(), lo, hi)?),
                iterations: iter,
                converged: true,
            });
        }
    }
    Ok(RefineResult {
        feasible: true,
        band: Some(BandFn::new(grid.clone(), lo, hi)?),
        iterations: max_iter,
        converged: false,
    })
}

/// Refinement with the default tolerance and iteration cap.
pub fn refine(band: &BandFn) -> Result<RefineResult> {
    refine_blc(band, DEFAULT_MAX_ITER, DEFAULT_TOL)
}

fn check_anchor_args(a: f64, b: f64, r: f64, s: f64) -> Result<()> {
    if !(a < b) {
        return Err(Error::OutOfRange(format!("need a < b, got a = {a}, b = {b}")));
    }
    if !(0.0 < r && r < s && s < 1.0) {
        return Err(Error::OutOfRange(format!("need 0 < r < s < 1, got r = {r}, s = {s}")));
    }
    Ok(())
}

/// Rates `(log(s/r), log((1-r)/(1-s))) / (b - a)`.
pub fn tail_rates(a: f64, b: f64, r: f64, s: f64) -> Result<(f64, f64)> {
    check_anchor_args(a, b, r, s)?;
    Ok(((s / r).ln() / (b - a), ((1.0 - r) / (1.0 - s)).ln() / (b - a)))
}

/// Lipschitz constant of the refined band implied by `L(a) >= r` and
/// `U(b) <= s` on the raw band.
pub fn lipschitz_bound(raw: &BandFn, a: f64, b: f64, r: f64, s: f64) -> Result<f64> {
    check_anchor_args(a, b, r, s)?;
    let (la, _) = raw.eval(a);
    let (_, ub) = raw.eval(b);
    if la < r || ub > s {
        return Err(Error::OutOfRange(format!(
            "need L(a) >= r and U(b) <= s, got L(a) = {la}, U(b) = {ub}"
        )));
    }
    let (g1, g2) = tail_rates(a, b, r, s)?;
    Ok(g1.max(g2))
}

/// Largest slope of either boundary between consecutive grid points.
pub fn max_grid_slope(band: &BandFn) -> f64 {
    let t = band.grid().points();
    let slope = |v: &[f64]| {
        (1..t.len())
            .map(|i| (v[i] - v[i - 1]) / (t[i] - t[i - 1]))
            .fold(0.0, f64::max)
    };
    slope(band.lower()).max(slope(band.upper()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub pass: bool,
    pub first_violation: Option<f64>,
}

/// Scans the exponential tail bounds
/// `U°(x) <= r exp(g1 (x - a))` for grid `x <= a` and
/// `1 - L°(x) <= (1 - s) exp(-g2 (x - b))` for grid `x >= b`,
/// given `U(a) <= r` and `L(b) >= s` on the raw band.
pub fn tail_bound_check(raw: &BandFn, refined: &BandFn, a: f64, b: f64, r: f64, s: f64) -> Result<TailCheck> {
    let (g1, g2) = tail_rates(a, b, r, s)?;
    let (_, ua) = raw.eval(a);
    let (lb, _) = raw.eval(b);
    if ua > r || lb < s {
        return Err(Error::OutOfRange(format!(
            "need U(a) <= r and L(b) >= s, got U(a) = {ua}, L(b) = {lb}"
        )));
    }
    const REL: f64 = 1e-9;
    let t = refined.grid().points();
    for (i, &x) in t.iter().enumerate() {
        if x <= a {
            let bound = r * (g1 * (x - a)).exp();
            if refined.upper()[i] > bound * (1.0 + REL) {
                return Ok(TailCheck { pass: false, first_violation: Some(x) });
            }
        }
        if x >= b {
            let bound = (1.0 - s) * (-g2 * (x - b)).exp();
            if 1.0 - refined.lower()[i] > bound * (1.0 + REL) {
                return Ok(TailCheck { pass: false, first_violation: Some(x) });
            }
        }
    }
    Ok(TailCheck { pass: true, first_violation: None })
}
