use crate::error::{Error, Result};
use crate::sample::Sample;

/// Default number of equispaced fill points added by [`build_grid`].
pub const DEFAULT_FILL: usize = 512;
/// Default outer margin as a fraction of the sample range.
pub const DEFAULT_MARGIN_FRAC: f64 = 0.25;

/// Strictly increasing evaluation points `t_0 < t_1 < ... < t_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("no points".into()));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite point at index {i}")));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "not strictly increasing at index {}: {} >= {}",
                i + 1,
                points[i],
                points[i + 1]
            )));
        }
        Ok(Self { points })
    }

    /// `n` equispaced points from `a` to `b` inclusive.
    pub fn linspace(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 || a >= b {
            return Err(Error::InvalidGrid(format!("linspace({a}, {b}, {n})")));
        }
        let h = (b - a) / (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
        pts[n - 1] = b;
        Self::new(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Index of the largest grid point `<= x`, if any.
    pub fn floor_index(&self, x: f64) -> Option<usize> {
        self.points.partition_point(|&t| t <= x).checked_sub(1)
    }

    /// Index of the smallest grid point `>= x`, if any.
    pub fn ceil_index(&self, x: f64) -> Option<usize> {
        let i = self.points.partition_point(|&t| t < x);
        (i < self.points.len()).then_some(i)
    }

    /// Index of a grid point equal to `x`, if present.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.points.binary_search_by(|t| t.total_cmp(&x)).ok()
    }
}

/// Grid containing every sample point, `n_fill` equispaced interior points of
/// `[X_(1) - margin, X_(n) + margin]`, and both margin endpoints.
///
/// `margin = margin_frac * (X_(n) - X_(1))`, or `margin_frac` itself when all
/// observations coincide. Candidates closer than `1e-12 * max(1, range)` are
/// merged, keeping sample points in preference to fill points.
pub fn build_grid(sample: &Sample, n_fill: usize, margin_frac: f64) -> Result<Grid> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(margin_frac > 0.0) || !margin_frac.is_finite() {
        return Err(Error::OutOfRange(format!("margin_frac = {margin_frac}")));
    }
    let data = sample.support_points();
    let (min, max) = data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let range = max - min;
    let margin = if range > 0.0 { margin_frac * range } else { margin_frac };
    let (lo, hi) = (min - margin, max + margin);

    // (point, is_data)
    let mut cands: Vec<(f64, bool)> = data.iter().map(|&x| (x, true)).collect();
    cands.push((lo, false));
    cands.push((hi, false));
    let step = (hi - lo) / (n_fill + 1) as f64;
    cands.extend((1..=n_fill).map(|k| (lo + step * k as f64, false)));
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));

    let tol = 1e-12 * range.abs().max(1.0);
    let mut merged: Vec<(f64, bool)> = Vec::with_capacity(cands.len());
    for (x, is_data) in cands {
        match merged.last_mut() {
            Some(last) if x - last.0 < tol => {
                if is_data && !last.1 {
                    *last = (x, true);
                }
            }
            _ => merged.push((x, is_data)),
        }
    }
    Grid::new(merged.into_iter().map(|(x, _)| x).collect())
}
