//! Concave interior of a pair of boundary sequences.
//!
//! Given `ell <= u` on a finite grid `T`, the concave interior is the pair
//! `(ell_o, u_o)` of the pointwise infimum and supremum of all concave
//! functions `g` with `ell <= g <= u` on `T`. The infimum is the least
//! concave majorant of `ell`. The supremum at `x` is
//!
//! ```text
//! min { u(s) + (u(s) - ell_o(r)) / (s - r) * (x - s) : r in T_o, s in T,
//!       r < s <= x  or  x <= s < r }
//! ```
//!
//! where `T_o` is the knot set of `ell_o`.

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Relative slack of the feasibility test `ell_o <= u`, absorbing the
/// rounding of linear interpolation between hull knots.
pub const FEASIBILITY_SLACK: f64 = 1e-10;

/// Piecewise-linear concave function on `[knots_x[0], knots_x[last]]`,
/// equal to `-inf` outside.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveEnvelope {
    knots_x: Vec<f64>,
    knots_y: Vec<f64>,
    knot_index: Vec<usize>,
}

impl ConcaveEnvelope {
    pub fn knots_x(&self) -> &[f64] {
        &self.knots_x
    }

    pub fn knots_y(&self) -> &[f64] {
        &self.knots_y
    }

    /// Grid indices of the knots.
    pub fn knot_index(&self) -> &[usize] {
        &self.knot_index
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.knots_x
            .windows(2)
            .zip(self.knots_y.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.knots_x.len();
        if x < self.knots_x[0] || x > self.knots_x[k - 1] {
            return f64::NEG_INFINITY;
        }
        let j = self.knots_x.partition_point(|&t| t <= x);
        if j == 0 {
            return self.knots_y[0];
        }
        if j == k {
            return self.knots_y[k - 1];
        }
        let (x0, x1) = (self.knots_x[j - 1], self.knots_x[j]);
        let (y0, y1) = (self.knots_y[j - 1], self.knots_y[j]);
        if x == x0 {
            return y0;
        }
        y0 + (y1 - y0) * ((x - x0) / (x1 - x0))
    }

    /// Values on every point of `grid` (the grid the envelope was built on).
    pub fn on_grid(&self, grid: &Grid) -> Vec<f64> {
        let pts = grid.points();
        let mut out = vec![f64::NEG_INFINITY; pts.len()];
        for w in 0..self.knot_index.len() {
            let i = self.knot_index[w];
            out[i] = self.knots_y[w];
            if w + 1 < self.knot_index.len() {
                let j = self.knot_index[w + 1];
                let slope = (self.knots_y[w + 1] - self.knots_y[w]) / (pts[j] - pts[i]);
                for k in i + 1..j {
                    out[k] = self.knots_y[w] + slope * (pts[k] - pts[i]);
                }
            }
        }
        out
    }
}

/// Least concave majorant of `ell` on `grid` (upper hull of the finite
/// points). Collinear points are dropped so knots are where the slope
/// strictly decreases.
pub fn least_concave_majorant(grid: &Grid, ell: &[f64]) -> Result<ConcaveEnvelope> {
    if ell.len() != grid.len() {
        return Err(Error::InvalidGrid(format!(
            "{} values for a grid of {} points",
            ell.len(),
            grid.len()
        )));
    }
    if ell.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(Error::OutOfRange("lower boundary must lie in [-inf, inf)".into()));
    }
    let pts = grid.points();
    let mut hull: Vec<usize> = Vec::new();
    for (i, &y) in ell.iter().enumerate() {
        if y == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b unless slope(a, b) > slope(b, i)
            let lhs = (ell[b] - ell[a]) * (pts[i] - pts[b]);
            let rhs = (y - ell[b]) * (pts[b] - pts[a]);
            if lhs <= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    if hull.len() < 2 {
        return Err(Error::TooFewFinite(hull.len()));
    }
    Ok(ConcaveEnvelope {
        knots_x: hull.iter().map(|&i| pts[i]).collect(),
        knots_y: hull.iter().map(|&i| ell[i]).collect(),
        knot_index: hull,
    })
}

/// Feasible concave interior: the envelope `ell_o` and the data needed to
/// evaluate `u_o` anywhere.
#[derive(Debug, Clone)]
pub struct ConcaveInterior {
    grid: Grid,
    u: Vec<f64>,
    ell_o: ConcaveEnvelope,
    // min over knots r < s of (u(s) - ell_o(r)) / (s - r)
    slope_left: Vec<Option<f64>>,
    // max over knots r > s of (ell_o(r) - u(s)) / (r - s)
    slope_right: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub enum ConcIntResult {
    Feasible(ConcaveInterior),
    /// `ell_o > u` at grid index `index`.
    Infeasible { index: usize },
}

impl ConcIntResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, ConcIntResult::Feasible(_))
    }

    pub fn interior(&self) -> Result<&ConcaveInterior> {
        match self {
            ConcIntResult::Feasible(ci) => Ok(ci),
            ConcIntResult::Infeasible { .. } => Err(Error::Infeasible),
        }
    }

    pub fn into_interior(self) -> Result<ConcaveInterior> {
        match self {
            ConcIntResult::Feasible(ci) => Ok(ci),
            ConcIntResult::Infeasible { .. } => Err(Error::Infeasible),
        }
    }
}

/// Computes the concave interior of `(ell, u)` on `grid`, or reports that no
/// concave function fits between them.
///
/// `ell = u` is allowed at grid points; `ell` must be finite at two or more
/// points.
pub fn conc_int(grid: &Grid, ell: &[f64], u: &[f64]) -> Result<ConcIntResult> {
    if u.len() != grid.len() {
        return Err(Error::InvalidGrid(format!(
            "{} upper values for a grid of {} points",
            u.len(),
            grid.len()
        )));
    }
    if u.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(Error::OutOfRange("upper boundary must lie in [-inf, inf)".into()));
    }
    if let Some(i) = ell.iter().zip(u).position(|(l, h)| l > h) {
        return Err(Error::OutOfRange(format!("lower boundary exceeds upper at index {i}")));
    }
    let ell_o = least_concave_majorant(grid, ell)?;
    let lo_vals = ell_o.on_grid(grid);
    for (i, (&lo, &hi)) in lo_vals.iter().zip(u).enumerate() {
        if lo > hi + FEASIBILITY_SLACK * hi.abs().max(1.0) {
            return Ok(ConcIntResult::Infeasible { index: i });
        }
    }

    let pts = grid.points();
    let kx = ell_o.knots_x();
    let ky = ell_o.knots_y();
    let mut slope_left = vec![None; pts.len()];
    let mut slope_right = vec![None; pts.len()];
    for (i, (&s, &us)) in pts.iter().zip(u).enumerate() {
        let split = kx.partition_point(|&r| r < s);
        let after = kx.partition_point(|&r| r <= s);
        if split > 0 {
            let m = (0..split)
                .map(|w| (us - ky[w]) / (s - kx[w]))
                .fold(f64::INFINITY, f64::min);
            slope_left[i] = Some(m);
        }
        if after < kx.len() {
            let m = (after..kx.len())
                .map(|w| (ky[w] - us) / (kx[w] - s))
                .fold(f64::NEG_INFINITY, f64::max);
            slope_right[i] = Some(m);
        }
    }

    Ok(ConcIntResult::Feasible(ConcaveInterior {
        grid: grid.clone(),
        u: u.to_vec(),
        ell_o,
        slope_left,
        slope_right,
    }))
}

impl ConcaveInterior {
    pub fn ell_o(&self) -> &ConcaveEnvelope {
        &self.ell_o
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn lower_on_grid(&self) -> Vec<f64> {
        self.ell_o.on_grid(&self.grid)
    }

    /// `u_o(x)`: supremum of `g(x)` over concave `g` between the boundaries.
    pub fn upper_at(&self, x: f64) -> f64 {
        let pts = self.grid.points();
        let mut best = f64::INFINITY;
        for (i, &s) in pts.iter().enumerate() {
            let us = self.u[i];
            if s == x {
                if self.slope_left[i].is_some() || self.slope_right[i].is_some() {
                    best = best.min(us);
                }
                continue;
            }
            let slope = if s < x { self.slope_left[i] } else { self.slope_right[i] };
            if let Some(m) = slope {
                best = best.min(us + m * (x - s));
            }
        }
        best
    }

    pub fn upper_on_grid(&self) -> Vec<f64> {
        self.grid.points().iter().map(|&x| self.upper_at(x)).collect()
    }
}

/// Free-function form of [`ConcaveInterior::upper_at`].
pub fn eval_u_o(result: &ConcIntResult, x: f64) -> Result<f64> {
    Ok(result.interior()?.upper_at(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const NEG: f64 = f64::NEG_INFINITY;

    fn grid(v: &[f64]) -> Grid {
        Grid::new(v.to_vec()).unwrap()
    }

    #[test]
    fn concave_input_is_its_own_majorant() {
        let g = grid(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let ell: Vec<f64> = g.points().iter().map(|x| -x * x).collect();
        let env = least_concave_majorant(&g, &ell).unwrap();
        assert_eq!(env.on_grid(&g), ell);
        assert_eq!(env.knot_index(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn neg_infinity_imposes_nothing() {
        let g = grid(&[0.0, 1.0, 2.0]);
        let env = least_concave_majorant(&g, &[0.0, NEG, 0.0]).unwrap();
        assert_eq!(env.eval(1.0), 0.0);
        assert_eq!(env.eval(-0.5), NEG);
        assert_eq!(env.eval(2.5), NEG);
    }

    #[test]
    fn collinear_points_collapse_to_outer_knots() {
        let g = grid(&[0.0, 1.0, 2.0, 3.0]);
        let env = least_concave_majorant(&g, &[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(env.knot_index(), &[0, 3]);
    }

    #[test]
    fn too_few_finite_values() {
        let g = grid(&[0.0, 1.0, 2.0]);
        assert_eq!(
            least_concave_majorant(&g, &[NEG, 1.0, NEG]).unwrap_err(),
            Error::TooFewFinite(1)
        );
    }

    #[test]
    fn majorant_is_idempotent() {
        let g = grid(&[0.0, 0.5, 1.3, 2.0, 2.2, 3.1]);
        let ell = [0.1, 1.2, 0.4, 1.9, NEG, 0.3];
        let env = least_concave_majorant(&g, &ell).unwrap();
        let again = least_concave_majorant(&g, &env.on_grid(&g)).unwrap();
        let (a, b) = (env.on_grid(&g), again.on_grid(&g));
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn pinched_concave_band() {
        let g = grid(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let v: Vec<f64> = g.points().iter().map(|x| -x * x).collect();
        let r = conc_int(&g, &v, &v).unwrap();
        let ci = r.interior().unwrap();
        assert_eq!(ci.lower_on_grid(), v);
        for (a, b) in ci.upper_on_grid().iter().zip(&v) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn midpoint_concavity_infeasible() {
        let g = grid(&[0.0, 1.0, 2.0]);
        let r = conc_int(&g, &[0.0, NEG, 0.0], &[1.0, -10.0, 1.0]).unwrap();
        assert!(!r.is_feasible());
        assert!(matches!(r, ConcIntResult::Infeasible { index: 1 }));
        assert_eq!(eval_u_o(&r, 1.0), Err(Error::Infeasible));
    }

    #[test]
    fn upper_is_below_u_on_grid() {
        let g = grid(&[0.0, 1.0, 2.0, 3.0]);
        let ell = [0.0, 0.5, 0.5, 0.0];
        let u = [1.0, 1.0, 1.5, 1.0];
        let r = conc_int(&g, &ell, &u).unwrap();
        let ci = r.interior().unwrap();
        for (a, b) in ci.upper_on_grid().iter().zip(&u) {
            assert!(a <= b);
        }
        // the line through (1, 1) and (0, 0) caps the value at 2
        assert_abs_diff_eq!(ci.upper_at(2.0), 1.5, epsilon = 1e-15);
        // beyond the grid the interior extrapolates a finite line
        assert!(ci.upper_at(10.0).is_finite());
    }

    #[test]
    fn rejects_crossed_boundaries() {
        let g = grid(&[0.0, 1.0]);
        assert!(conc_int(&g, &[1.0, 0.0], &[0.5, 1.0]).is_err());
    }
}
