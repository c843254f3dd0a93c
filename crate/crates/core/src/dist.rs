//! Analytic distribution families with closed-form CDF, density and
//! density derivative.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AnalyticDist {
    /// Standard normal.
    Normal,
    /// Standard logistic, `F(x) = 1 / (1 + e^-x)`.
    Logistic,
    /// Standard exponential.
    Exponential,
    /// `N(-delta, 1) / 2 + N(delta, 1) / 2`.
    NormalMixture { delta: f64 },
    /// Density `1 + a sin(2 pi k x)` on `(0, 1)`.
    Sine { k: u32, a: f64 },
}

pub fn mixture_normal(delta: f64) -> Result<AnalyticDist> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::OutOfRange(format!("delta = {delta}")));
    }
    Ok(AnalyticDist::NormalMixture { delta })
}

pub fn sine_density(k: u32, a: f64) -> Result<AnalyticDist> {
    if k < 1 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::OutOfRange(format!("a = {a} not in (0, 1)")));
    }
    Ok(AnalyticDist::Sine { k, a })
}

fn phi(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Normal CDF; `erfc` of a non-negative argument in the lower tail.
fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

fn norm_sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

impl AnalyticDist {
    pub fn name(&self) -> String {
        match self {
            AnalyticDist::Normal => "normal".into(),
            AnalyticDist::Logistic => "logistic".into(),
            AnalyticDist::Exponential => "exponential".into(),
            AnalyticDist::NormalMixture { delta } => format!("mixture(delta={delta})"),
            AnalyticDist::Sine { k, a } => format!("sine(k={k},a={a})"),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            AnalyticDist::Normal => norm_cdf(x),
            AnalyticDist::Logistic => logistic(x),
            AnalyticDist::Exponential => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x).exp_m1()
                }
            }
            AnalyticDist::NormalMixture { delta } => 0.5 * (norm_cdf(x + delta) + norm_cdf(x - delta)),
            AnalyticDist::Sine { k, a } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    let w = 2.0 * PI * k as f64;
                    x + a * (1.0 - (w * x).cos()) / w
                }
            }
        }
    }

    /// Survival function `1 - F(x)`, accurate in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            AnalyticDist::Normal => norm_sf(x),
            AnalyticDist::Logistic => logistic(-x),
            AnalyticDist::Exponential => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-x).exp()
                }
            }
            AnalyticDist::NormalMixture { delta } => 0.5 * (norm_sf(x + delta) + norm_sf(x - delta)),
            AnalyticDist::Sine { .. } => 1.0 - self.cdf(x),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            AnalyticDist::Normal => phi(x),
            AnalyticDist::Logistic => logistic(x) * logistic(-x),
            AnalyticDist::Exponential => {
                if x < 0.0 {
                    0.0
                } else {
                    (-x).exp()
                }
            }
            AnalyticDist::NormalMixture { delta } => 0.5 * (phi(x + delta) + phi(x - delta)),
            AnalyticDist::Sine { k, a } => {
                if x <= 0.0 || x >= 1.0 {
                    0.0
                } else {
                    1.0 + a * (2.0 * PI * k as f64 * x).sin()
                }
            }
        }
    }

    pub fn pdf_deriv(&self, x: f64) -> f64 {
        match *self {
            AnalyticDist::Normal => -x * phi(x),
            AnalyticDist::Logistic => {
                let (f, s) = (logistic(x), logistic(-x));
                f * s * (s - f)
            }
            AnalyticDist::Exponential => {
                if x < 0.0 {
                    0.0
                } else {
                    -(-x).exp()
                }
            }
            AnalyticDist::NormalMixture { delta } => {
                0.5 * (-(x + delta) * phi(x + delta) - (x - delta) * phi(x - delta))
            }
            AnalyticDist::Sine { k, a } => {
                if x <= 0.0 || x >= 1.0 {
                    0.0
                } else {
                    let w = 2.0 * PI * k as f64;
                    w * a * (w * x).cos()
                }
            }
        }
    }

    /// Open interval `J(F) = {0 < F < 1}`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            AnalyticDist::Exponential => (0.0, f64::INFINITY),
            AnalyticDist::Sine { .. } => (0.0, 1.0),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Finite interval used for grid scans.
    pub fn support_hint(&self) -> (f64, f64) {
        match *self {
            AnalyticDist::Normal => (-8.0, 8.0),
            AnalyticDist::Logistic => (-30.0, 30.0),
            AnalyticDist::Exponential => (0.0, 30.0),
            AnalyticDist::NormalMixture { delta } => (-8.0 - delta.max(0.0), 8.0 + delta.max(0.0)),
            AnalyticDist::Sine { .. } => (0.0, 1.0),
        }
    }

    /// Quantile by bisection on the support hint.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::OutOfRange(format!("probability {p} not in (0, 1)")));
        }
        let (mut lo, mut hi) = self.support_hint();
        while self.cdf(lo) > p {
            lo -= hi - lo;
        }
        while self.cdf(hi) < p {
            hi += hi - lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            AnalyticDist::Normal => rng.sample(StandardNormal),
            AnalyticDist::Logistic => {
                let u: f64 = rng.gen_range(f64::EPSILON..1.0);
                (u / (1.0 - u)).ln()
            }
            AnalyticDist::Exponential => Exp1.sample(rng),
            AnalyticDist::NormalMixture { delta } => {
                let z: f64 = rng.sample(StandardNormal);
                if rng.gen_bool(0.5) {
                    z + delta
                } else {
                    z - delta
                }
            }
            AnalyticDist::Sine { .. } => {
                let u: f64 = rng.gen_range(f64::EPSILON..1.0);
                self.quantile(u).expect("u in (0, 1)")
            }
        }
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn families() -> Vec<AnalyticDist> {
        vec![
            AnalyticDist::Normal,
            AnalyticDist::Logistic,
            AnalyticDist::Exponential,
            mixture_normal(1.34).unwrap(),
            sine_density(3, 0.05).unwrap(),
        ]
    }

    #[test]
    fn mixture_collapses_to_normal() {
        let d = mixture_normal(0.0).unwrap();
        assert_abs_diff_eq!(d.pdf(0.0), 0.398942280401433, epsilon = 1e-14);
        assert_abs_diff_eq!(d.cdf(1.3), norm_cdf(1.3), epsilon = 1e-15);
    }

    #[test]
    fn mixture_symmetry() {
        let d = mixture_normal(1.34).unwrap();
        assert_abs_diff_eq!(d.pdf(0.7), d.pdf(-0.7), epsilon = 1e-16);
        assert_abs_diff_eq!(d.cdf(0.7), d.sf(-0.7), epsilon = 1e-15);
    }

    #[test]
    fn mixture_derivative_matches_finite_difference() {
        let d = mixture_normal(1.34).unwrap();
        let h = 1e-5;
        for i in 0..=100 {
            let x = -5.0 + 0.1 * i as f64;
            let fd = (d.pdf(x + h) - d.pdf(x - h)) / (2.0 * h);
            assert!((fd - d.pdf_deriv(x)).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for d in families() {
            let (a, b) = d.support_hint();
            let (a, b) = (a.max(-6.0) + 0.01, b.min(6.0) - 0.01);
            for i in 0..=50 {
                let x = a + (b - a) * i as f64 / 50.0;
                let fd = (d.cdf(x + h) - d.cdf(x - h)) / (2.0 * h);
                assert!((fd - d.pdf(x)).abs() < 1e-6, "{} pdf at {x}", d.name());
                let fd2 = (d.pdf(x + h) - d.pdf(x - h)) / (2.0 * h);
                assert!((fd2 - d.pdf_deriv(x)).abs() < 1e-5, "{} pdf' at {x}", d.name());
            }
        }
    }

    #[test]
    fn sine_normalization() {
        let d = sine_density(3, 0.3).unwrap();
        assert_abs_diff_eq!(d.cdf(1.0 - 1e-15), 1.0, epsilon = 1e-12);
        assert_eq!(d.cdf(1.0), 1.0);
        assert!(sine_density(0, 0.5).is_err());
        assert!(sine_density(1, 1.0).is_err());
    }

    #[test]
    fn cdf_and_sf_are_complementary() {
        for d in families() {
            for x in [-2.0, -0.3, 0.2, 0.5, 0.9, 3.0] {
                assert_abs_diff_eq!(d.cdf(x) + d.sf(x), 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for d in families() {
            for p in [0.02, 0.5, 0.98] {
                let q = d.quantile(p).unwrap();
                assert_abs_diff_eq!(d.cdf(q), p, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn tail_accuracy() {
        // 1 - Phi(8) ≈ 6.22e-16 must not round to zero
        assert!(AnalyticDist::Normal.sf(8.0) > 6e-16);
        assert!(AnalyticDist::Normal.cdf(-8.0) > 6e-16);
    }
}
