use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Lower and upper boundaries of a confidence band, tabulated on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BandFn {
    grid: Grid,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BandFn {
    /// Checks `0 <= lower <= upper <= 1` and that both boundaries are
    /// non-decreasing.
    pub fn new(grid: Grid, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let m = grid.len();
        if lower.len() != m || upper.len() != m {
            return Err(Error::InvalidBand(format!(
                "lengths {}/{} do not match grid of {m} points",
                lower.len(),
                upper.len()
            )));
        }
        for i in 0..m {
            let (l, u) = (lower[i], upper[i]);
            if !(0.0..=1.0).contains(&l) || !(0.0..=1.0).contains(&u) {
                return Err(Error::InvalidBand(format!(
                    "values outside [0, 1] at index {i}: ({l}, {u})"
                )));
            }
            if l > u {
                return Err(Error::InvalidBand(format!("lower > upper at index {i}: {l} > {u}")));
            }
        }
        if let Some(i) = lower.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidBand(format!("lower decreases at index {}", i + 1)));
        }
        if let Some(i) = upper.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidBand(format!("upper decreases at index {}", i + 1)));
        }
        Ok(Self { grid, lower, upper })
    }

    /// Band with `L < 1` and `U > 0` everywhere, as required of an input to
    /// the shape-constrained refinement.
    pub fn new_strict(grid: Grid, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = Self::new(grid, lower, upper)?;
        b.check_strict()?;
        Ok(b)
    }

    pub fn check_strict(&self) -> Result<()> {
        if let Some(i) = self.lower.iter().position(|&l| l >= 1.0) {
            return Err(Error::InvalidBand(format!("lower reaches 1 at index {i}")));
        }
        if let Some(i) = self.upper.iter().position(|&u| u <= 0.0) {
            return Err(Error::InvalidBand(format!("upper reaches 0 at index {i}")));
        }
        Ok(())
    }

    /// Band with `L = U = values`.
    pub fn pinched(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.clone(), values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Conservative off-grid evaluation.
    ///
    /// The lower value comes from the largest grid point `<= x` (0 left of
    /// the grid) and the upper value from the smallest grid point `>= x`
    /// (1 right of the grid), so the band is never narrowed between points.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let lo = self.grid.floor_index(x).map_or(0.0, |i| self.lower[i]);
        let hi = self.grid.ceil_index(x).map_or(1.0, |i| self.upper[i]);
        (lo, hi)
    }

    /// Largest pointwise width `U - L` over the grid.
    pub fn max_width(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .fold(0.0, f64::max)
    }

    /// Whether `values` (tabulated on the same grid) lies inside the band.
    pub fn contains(&self, values: &[f64]) -> bool {
        values
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| l <= v && v <= u)
    }

    /// Whether `self` lies inside `outer` at every grid point.
    pub fn nested_in(&self, outer: &BandFn) -> bool {
        self.grid == outer.grid
            && self
                .lower
                .iter()
                .zip(&outer.lower)
                .all(|(inner, outer)| inner >= outer)
            && self
                .upper
                .iter()
                .zip(&outer.upper)
                .all(|(inner, outer)| inner <= outer)
    }
}

/// Free-function form of [`BandFn::eval`].
pub fn eval_band(band: &BandFn, x: f64) -> (f64, f64) {
    band.eval(x)
}

/// Bounds `lo <= hi` on a scalar functional. Either end may be infinite,
/// which marks it as open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsInterval {
    pub lo: f64,
    pub hi: f64,
}

impl BoundsInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::OutOfRange(format!("bounds ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band() -> BandFn {
        let g = Grid::new(vec![0.0, 1.0, 2.0]).unwrap();
        BandFn::new(g, vec![0.0, 0.2, 0.5], vec![0.3, 0.6, 1.0]).unwrap()
    }

    #[test]
    fn eval_left_of_grid() {
        assert_eq!(band().eval(-1.0), (0.0, 0.3));
    }

    #[test]
    fn eval_on_grid() {
        assert_eq!(band().eval(1.0), (0.2, 0.6));
    }

    #[test]
    fn eval_between_points_brackets() {
        assert_eq!(band().eval(1.5), (0.2, 1.0));
        assert_eq!(band().eval(0.5), (0.0, 0.6));
    }

    #[test]
    fn eval_right_of_grid() {
        assert_eq!(band().eval(3.0), (0.5, 1.0));
    }

    #[test]
    fn validation() {
        let g = Grid::new(vec![0.0, 1.0]).unwrap();
        assert!(BandFn::new(g.clone(), vec![0.5, 0.4], vec![0.6, 0.7]).is_err());
        assert!(BandFn::new(g.clone(), vec![0.5, 0.8], vec![0.6, 0.7]).is_err());
        assert!(BandFn::new(g.clone(), vec![0.0, 0.1], vec![0.6, 1.1]).is_err());
        assert!(BandFn::new_strict(g.clone(), vec![0.0, 0.1], vec![0.0, 1.0]).is_err());
        assert!(BandFn::new_strict(g, vec![0.0, 0.1], vec![0.1, 1.0]).is_ok());
    }

    #[test]
    fn eval_never_crosses() {
        let b = band();
        for k in -20..=60 {
            let (lo, hi) = b.eval(k as f64 * 0.05);
            assert!(lo <= hi);
        }
    }

    #[test]
    fn bounds_interval_order() {
        assert!(BoundsInterval::new(1.0, 0.0).is_err());
        let b = BoundsInterval::new(0.0, f64::INFINITY).unwrap();
        assert!(!b.is_bounded());
        assert!(b.contains(5.0));
    }
}
