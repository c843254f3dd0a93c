//! Bounds on functionals of every distribution function inside a band.
//!
//! Integrals run over the whole line, so the band is extended beyond its grid
//! by exponential tails (see [`LogLinearBand`]). Between grid points `U` and
//! `1 - L` are interpolated log-linearly, which is exact for refined bands.

use serde::{Deserialize, Serialize};

use crate::band::{BandFn, BoundsInterval};
use crate::dist::AnalyticDist;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::refine::RefineResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HazardKind {
    Hazard,
    ReverseHazard,
}

/// Suprema of the reverse hazard `f/F` and hazard `f/(1-F)` over `grid`.
/// A side where the support is bounded reports `+inf`.
pub fn t1_t2(dist: &AnalyticDist, grid: &Grid) -> Result<(f64, f64)> {
    let (lo, hi) = dist.support();
    let mut t1 = 0.0f64;
    let mut t2 = 0.0f64;
    for &x in grid.points() {
        let (f, sf) = (dist.cdf(x), dist.sf(x));
        if !(f > 0.0 && sf > 0.0) {
            return Err(Error::DegenerateCdf(x));
        }
        let d = dist.pdf(x);
        t1 = t1.max(d / f);
        t2 = t2.max(d / sf);
    }
    if lo > f64::NEG_INFINITY {
        t1 = f64::INFINITY;
    }
    if hi < f64::INFINITY {
        t2 = f64::INFINITY;
    }
    Ok((t1, t2))
}

/// One boundary on one grid segment, as a function of the offset `s` from
/// the left end: `c * exp(beta * s)` or `a + b * s`.
#[derive(Debug, Clone, Copy)]
enum Piece {
    LogLin { c: f64, beta: f64 },
    Linear { a: f64, b: f64 },
}

impl Piece {
    fn between(v0: f64, v1: f64, d: f64) -> Piece {
        if v0 > 0.0 && v1 > 0.0 {
            Piece::LogLin { c: v0, beta: (v1 / v0).ln() / d }
        } else {
            Piece::Linear { a: v0, b: (v1 - v0) / d }
        }
    }

    fn at(self, s: f64) -> f64 {
        match self {
            Piece::LogLin { c, beta } => c * (beta * s).exp(),
            Piece::Linear { a, b } => a + b * s,
        }
    }

    /// `int_0^d exp(t (x1 + s)) * piece(s) ds`.
    fn exp_integral(self, t: f64, x1: f64, d: f64) -> f64 {
        let scale = (t * x1).exp();
        match self {
            Piece::LogLin { c, beta } => scale * c * d * expm1_ratio((t + beta) * d),
            Piece::Linear { a, b } => scale * d * (a * expm1_ratio(t * d) + b * d * first_moment_ratio(t * d)),
        }
    }
}

/// `(e^z - 1) / z`, continuous at zero.
fn expm1_ratio(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 + 0.5 * z
    } else {
        z.exp_m1() / z
    }
}

/// `int_0^1 u e^{z u} du`, continuous at zero.
fn first_moment_ratio(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        0.5 + z / 3.0 + z * z / 8.0 + z * z * z / 30.0
    } else {
        (z.exp() * (z - 1.0) + 1.0) / (z * z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Which {
    Lower,
    Upper,
}

/// A band with log-linear interpolation and exponential tails.
///
/// Left of `t_0` both boundaries decay as `B(t_0) exp(gamma_l (x - t_0))`;
/// right of `t_m`, `1 - B(x) = (1 - B(t_m)) exp(-gamma_r (x - t_m))`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLinearBand {
    grid: Grid,
    lower: Vec<f64>,
    upper: Vec<f64>,
    gamma_l: f64,
    gamma_r: f64,
}

impl LogLinearBand {
    pub fn new(band: &BandFn, gamma_l: f64, gamma_r: f64) -> Result<Self> {
        for (name, g) in [("gamma_l", gamma_l), ("gamma_r", gamma_r)] {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::OutOfRange(format!("{name} = {g}")));
            }
        }
        if band.len() < 2 {
            return Err(Error::InvalidGrid("need at least two grid points".into()));
        }
        Ok(Self {
            grid: band.grid().clone(),
            lower: band.lower().to_vec(),
            upper: band.upper().to_vec(),
            gamma_l,
            gamma_r,
        })
    }

    /// Reads the tail rates off the outermost usable log-secants.
    pub fn from_band(band: &BandFn) -> Result<Self> {
        let t = band.grid().points();
        let u = band.upper();
        let cl: Vec<f64> = band.lower().iter().map(|&l| 1.0 - l).collect();
        let gamma_l = (0..t.len().saturating_sub(1))
            .find(|&i| u[i] > 0.0 && u[i + 1] > 0.0)
            .map(|i| (u[i + 1] / u[i]).ln() / (t[i + 1] - t[i]));
        let gamma_r = (0..t.len().saturating_sub(1))
            .rev()
            .find(|&i| cl[i] > 0.0 && cl[i + 1] > 0.0)
            .map(|i| -(cl[i + 1] / cl[i]).ln() / (t[i + 1] - t[i]));
        match (gamma_l, gamma_r) {
            (Some(gl), _) if !(gl > 0.0) => Err(Error::NoExponentialTail("left")),
            (None, _) => Err(Error::NoExponentialTail("left")),
            (_, Some(gr)) if !(gr > 0.0) => Err(Error::NoExponentialTail("right")),
            (_, None) => Err(Error::NoExponentialTail("right")),
            (Some(gl), Some(gr)) => Self::new(band, gl, gr),
        }
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

    pub fn gamma_l(&self) -> f64 {
        self.gamma_l
    }

    pub fn gamma_r(&self) -> f64 {
        self.gamma_r
    }

    fn values(&self, which: Which) -> &[f64] {
        match which {
            Which::Lower => &self.lower,
            Which::Upper => &self.upper,
        }
    }

    /// Segment `i` of `U`, or of `1 - L`.
    fn piece(&self, which: Which, i: usize) -> Piece {
        let t = self.grid.points();
        let d = t[i + 1] - t[i];
        match which {
            Which::Upper => Piece::between(self.upper[i], self.upper[i + 1], d),
            Which::Lower => Piece::between(1.0 - self.lower[i], 1.0 - self.lower[i + 1], d),
        }
    }

    fn value(&self, which: Which, x: f64) -> f64 {
        let t = self.grid.points();
        let b = self.values(which);
        let m = t.len() - 1;
        if x < t[0] {
            return b[0] * (self.gamma_l * (x - t[0])).exp();
        }
        if x >= t[m] {
            return 1.0 - (1.0 - b[m]) * (-self.gamma_r * (x - t[m])).exp();
        }
        let i = self.grid.floor_index(x).unwrap_or(0).min(m - 1);
        let v = self.piece(which, i).at(x - t[i]);
        match which {
            Which::Upper => v,
            Which::Lower => 1.0 - v,
        }
    }

    pub fn upper_at(&self, x: f64) -> f64 {
        self.value(Which::Upper, x)
    }

    pub fn lower_at(&self, x: f64) -> f64 {
        self.value(Which::Lower, x)
    }

    /// `int t e^{tx} (1 - B) dx` for `t > 0`, `int |t| e^{tx} B dx` for `t < 0`.
    fn mgf_integral(&self, which: Which, t: f64) -> f64 {
        let p = self.grid.points();
        let b = self.values(which);
        let m = p.len() - 1;
        let (gl, gr) = (self.gamma_l, self.gamma_r);
        // integrals of e^{tx} B and e^{tx} (1 - B) over the grid segments
        let (mut with_b, mut with_comp) = (0.0, 0.0);
        for i in 0..m {
            let d = p[i + 1] - p[i];
            let whole = (t * p[i]).exp() * d * expm1_ratio(t * d);
            let direct = self.piece(which, i).exp_integral(t, p[i], d);
            let (ib, ic) = match which {
                Which::Upper => (direct, whole - direct),
                Which::Lower => (whole - direct, direct),
            };
            with_b += ib;
            with_comp += ic;
        }
        if t > 0.0 {
            let left = (t * p[0]).exp() * (1.0 - b[0] * t / (t + gl));
            let right = t * (1.0 - b[m]) * (t * p[m]).exp() / (gr - t);
            left + t * with_comp + right
        } else {
            let s = -t;
            let left = s * b[0] * (t * p[0]).exp() / (t + gl);
            let right = (t * p[m]).exp() * (1.0 - s * (1.0 - b[m]) / (gr - t));
            left + s * with_b + right
        }
    }
}

/// Attaches exponential tails to a feasible refinement result.
pub fn band_to_loglinear(result: &RefineResult) -> Result<LogLinearBand> {
    match (&result.band, result.feasible) {
        (Some(band), true) => LogLinearBand::from_band(band),
        _ => Err(Error::Infeasible),
    }
}

/// Bounds on `E exp(tX)` over distribution functions inside the band.
///
/// For `t > 0` the bounds are `int t e^{tx}(1 - U)` and `int t e^{tx}(1 - L)`;
/// for `t < 0` they are `int |t| e^{tx} L` and `int |t| e^{tx} U`.
pub fn mgf_bounds(band: &LogLinearBand, t: f64) -> Result<BoundsInterval> {
    if !t.is_finite() {
        return Err(Error::OutOfRange(format!("t = {t}")));
    }
    if t == 0.0 {
        return BoundsInterval::new(1.0, 1.0);
    }
    if t > 0.0 && t >= band.gamma_r {
        return Err(Error::MgfDivergent { t, rate_name: "gamma_r", rate: band.gamma_r });
    }
    if t < 0.0 && -t >= band.gamma_l {
        return Err(Error::MgfDivergent { t, rate_name: "gamma_l", rate: band.gamma_l });
    }
    let (lo, hi) = if t > 0.0 {
        (band.mgf_integral(Which::Upper, t), band.mgf_integral(Which::Lower, t))
    } else {
        (band.mgf_integral(Which::Lower, t), band.mgf_integral(Which::Upper, t))
    };
    // rounding can leave a pinched band with lo a hair above hi
    BoundsInterval::new(lo.min(hi), hi.max(lo))
}

const GL_NODES: [f64; 4] = [0.1834346424956498, 0.525532409916329, 0.7966664774136267, 0.9602898564975363];
const GL_WEIGHTS: [f64; 4] = [0.362683783378362, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];

/// Eight-point Gauss-Legendre rule on `[a, b]`.
fn gauss8(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        acc += w * (f(mid - half * x) + f(mid + half * x));
    }
    acc * half
}

/// `int_{y0}^inf y^j e^{-g (y - y0)} dy`.
fn shifted_gamma_tail(j: u32, g: f64, y0: f64) -> f64 {
    // j!/i! y0^i / g^{j-i+1}, summed from i = j down
    let mut acc = 0.0;
    let mut coef = 1.0;
    for i in (0..=j).rev() {
        acc += coef * y0.powi(i as i32) / g.powi((j - i + 1) as i32);
        coef *= i as f64;
    }
    acc
}

/// Subdivisions for quadrature over a stretch of tail inside the finite window.
const TAIL_PANELS: usize = 64;

/// `int phi'(x) (1[x >= c] - G(x)) dx` with `phi(x) = (x - c)^k`, where
/// `G` is `pick(phi'(x) >= 0)` at each `x`.
fn fubini(band: &LogLinearBand, k: u32, c: f64, pick: impl Fn(bool) -> Which) -> f64 {
    let kf = k as f64;
    let dphi = |x: f64| kf * (x - c).powi(k as i32 - 1);
    let integrand = |x: f64| {
        let d = dphi(x);
        let g = band.value(pick(d >= 0.0), x);
        if x >= c {
            d * (1.0 - g)
        } else {
            -d * g
        }
    };
    let p = band.grid.points();
    let m = p.len() - 1;
    let (t0, tm) = (p[0], p[m]);
    let mut total = 0.0;
    for i in 0..m {
        let (a, b) = (p[i], p[i + 1]);
        if a < c && c < b {
            total += gauss8(integrand, a, c) + gauss8(integrand, c, b);
        } else {
            total += gauss8(integrand, a, b);
        }
    }
    let panels = |a: f64, b: f64| {
        let h = (b - a) / TAIL_PANELS as f64;
        (0..TAIL_PANELS).map(|j| gauss8(integrand, a + h * j as f64, a + h * (j + 1) as f64)).sum::<f64>()
    };
    if c < t0 {
        total += panels(c, t0);
    }
    if c > tm {
        total += panels(tm, c);
    }
    // (-inf, min(t0, c)): -phi'(x) B0 e^{gamma_l (x - t0)}
    let e0 = t0.min(c);
    let left_sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let b0 = band.values(pick(left_sign > 0.0))[0];
    total -= left_sign * kf * b0 * (band.gamma_l * (e0 - t0)).exp() * shifted_gamma_tail(k - 1, band.gamma_l, c - e0);
    // (max(tm, c), inf): phi'(x) (1 - Bm) e^{-gamma_r (x - tm)}
    let s0 = tm.max(c);
    let bm = band.values(pick(true))[m];
    total += kf * (1.0 - bm) * (-band.gamma_r * (s0 - tm)).exp() * shifted_gamma_tail(k - 1, band.gamma_r, s0 - c);
    total
}

/// Bounds on `E (X - center)^k` over distribution functions inside the band.
///
/// Each sign region of `phi'` takes the boundary that extremizes it, so the
/// interval is valid but may be wider than attainable when `phi'` changes sign
/// (`k` even).
pub fn moment_bounds(band: &LogLinearBand, k: u32, center: f64) -> Result<BoundsInterval> {
    if k == 0 {
        return Err(Error::OutOfRange("moment order must be at least 1".into()));
    }
    if !center.is_finite() {
        return Err(Error::OutOfRange(format!("center = {center}")));
    }
    let lo = fubini(band, k, center, |pos| if pos { Which::Upper } else { Which::Lower });
    let hi = fubini(band, k, center, |pos| if pos { Which::Lower } else { Which::Upper });
    BoundsInterval::new(lo.min(hi), hi.max(lo))
}

fn ln_or_neg_inf(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Bounds on the hazard `g/(1-G)` or reverse hazard `g/G` at `x` for every
/// bi-log-concave `G` inside the band, from secants of the log boundaries.
/// An upper bound with no information is `+inf`.
pub fn hazard_envelope(band: &BandFn, x: f64, kind: HazardKind) -> Result<BoundsInterval> {
    let t = band.grid().points();
    if !(x > t[0] && x < t[t.len() - 1]) {
        return Err(Error::OutOfRange(format!("x = {x} not strictly inside the grid")));
    }
    // concave h with h' bracketed: left secants bound from above, right from below
    let (h_hi, h_lo): (Vec<f64>, Vec<f64>) = match kind {
        HazardKind::ReverseHazard => (
            band.upper().iter().map(|&u| ln_or_neg_inf(u)).collect(),
            band.lower().iter().map(|&l| ln_or_neg_inf(l)).collect(),
        ),
        HazardKind::Hazard => (
            band.lower().iter().map(|&l| ln_or_neg_inf(1.0 - l)).collect(),
            band.upper().iter().map(|&u| ln_or_neg_inf(1.0 - u)).collect(),
        ),
    };
    let n_left = t.partition_point(|&p| p <= x);
    let n_right = t.len() - t.partition_point(|&p| p < x);
    if n_left < 2 {
        return Err(Error::NoSecantPair("left"));
    }
    if n_right < 2 {
        return Err(Error::NoSecantPair("right"));
    }
    let right_start = t.len() - n_right;
    // h'(x) <= (h(s) - h(r))/(s - r) for r < s <= x
    let mut d_max = f64::INFINITY;
    for s in 1..n_left {
        for r in 0..s {
            d_max = d_max.min((h_hi[s] - h_lo[r]) / (t[s] - t[r]));
        }
    }
    // h'(x) >= (h(s) - h(r))/(s - r) for x <= r < s
    let mut d_min = f64::NEG_INFINITY;
    for r in right_start..t.len() {
        for s in r + 1..t.len() {
            d_min = d_min.max((h_lo[s] - h_hi[r]) / (t[s] - t[r]));
        }
    }
    let (lo, hi) = match kind {
        HazardKind::ReverseHazard => (d_min.max(0.0), d_max),
        // hazard = -h'
        HazardKind::Hazard => ((-d_max).max(0.0), -d_min),
    };
    let lo = if lo.is_nan() { 0.0 } else { lo };
    let hi = if hi.is_nan() { f64::INFINITY } else { hi };
    BoundsInterval::new(lo.min(hi), hi)
}
