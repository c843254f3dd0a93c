//! Shared test oracles. Independent of the library's algorithms.
#![allow(dead_code)]

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Outcome of optimizing `g(x)` over concave `g` with `ell <= g <= u` on the
/// grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpOutcome {
    Value(f64),
    Unbounded,
    Infeasible,
}

/// Linear program over the values of a concave piecewise-linear `g` with
/// knots at `grid ∪ {x}`: slopes must be non-increasing and
/// `ell <= g <= u` holds at the grid points.
pub fn lp_extreme(grid: &[f64], ell: &[f64], u: &[f64], x: f64, maximize: bool) -> LpOutcome {
    let mut pts: Vec<(f64, Option<usize>)> = grid.iter().enumerate().map(|(i, &t)| (t, Some(i))).collect();
    if !grid.contains(&x) {
        pts.push((x, None));
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let dir = if maximize {
        OptimizationDirection::Maximize
    } else {
        OptimizationDirection::Minimize
    };
    let mut lp = Problem::new(dir);
    let vars: Vec<_> = pts
        .iter()
        .map(|&(t, idx)| {
            let obj = if t == x { 1.0 } else { 0.0 };
            let bounds = match idx {
                Some(i) => (ell[i], u[i]),
                None => (f64::NEG_INFINITY, f64::INFINITY),
            };
            lp.add_var(obj, bounds)
        })
        .collect();
    for k in 1..pts.len() - 1 {
        let h0 = pts[k].0 - pts[k - 1].0;
        let h1 = pts[k + 1].0 - pts[k].0;
        // (g[k+1]-g[k])/h1 - (g[k]-g[k-1])/h0 <= 0
        lp.add_constraint(
            [
                (vars[k + 1], 1.0 / h1),
                (vars[k], -1.0 / h1 - 1.0 / h0),
                (vars[k - 1], 1.0 / h0),
            ],
            ComparisonOp::Le,
            0.0,
        );
    }
    match lp.solve() {
        Ok(sol) if sol.objective().is_finite() => LpOutcome::Value(sol.objective()),
        Ok(_) => LpOutcome::Unbounded,
        Err(minilp::Error::Unbounded) => LpOutcome::Unbounded,
        Err(minilp::Error::Infeasible) => LpOutcome::Infeasible,
    }
}

pub fn lp_feasible(grid: &[f64], ell: &[f64], u: &[f64]) -> bool {
    lp_extreme(grid, ell, u, grid[0], true) != LpOutcome::Infeasible
}

/// Random concave-interior instance with `3..=max_m` grid points. Roughly a
/// third of the instances are made infeasible by lifting `ell`.
pub fn random_instance(rng: &mut ChaCha8Rng, max_m: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = rng.gen_range(3..=max_m);
    let mut grid = Vec::with_capacity(m);
    let mut t = rng.gen_range(-3.0..0.0);
    for _ in 0..m {
        grid.push(t);
        t += rng.gen_range(0.2..1.5);
    }
    // concave base: decreasing slopes
    let mut slope = rng.gen_range(0.0..3.0);
    let mut g = vec![rng.gen_range(-1.0..1.0)];
    for k in 1..m {
        g.push(g[k - 1] + slope * (grid[k] - grid[k - 1]));
        slope -= rng.gen_range(0.0..2.0);
    }
    let mut u: Vec<f64> = g.iter().map(|v| v + rng.gen_range(0.0..0.4)).collect();
    let mut ell: Vec<f64> = g.iter().map(|v| v - rng.gen_range(0.0..0.4)).collect();
    if rng.gen_bool(0.4) {
        // a bump in ell or a dip in u; either may break concavity
        let k = rng.gen_range(0..m);
        if rng.gen_bool(0.5) {
            ell[k] = g[k] + rng.gen_range(0.3..2.0);
            u[k] = u[k].max(ell[k] + rng.gen_range(0.0..0.05));
        } else {
            u[k] = g[k] - rng.gen_range(0.3..2.0);
            ell[k] = ell[k].min(u[k] - rng.gen_range(0.0..0.05));
        }
    }
    for v in ell.iter_mut() {
        if rng.gen_bool(0.2) {
            *v = f64::NEG_INFINITY;
        }
    }
    if ell.iter().filter(|v| v.is_finite()).count() < 2 {
        ell[0] = (g[0] - 0.1).min(u[0] - 0.01);
        ell[m - 1] = (g[m - 1] - 0.1).min(u[m - 1] - 0.01);
    }
    (grid, ell, u)
}
