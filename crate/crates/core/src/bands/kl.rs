//! Binomial Kullback-Leibler divergence and the weight functions of the
//! likelihood-ratio band.

use crate::error::{Error, Result};

/// `p_hat log(p_hat/p) + (1-p_hat) log((1-p_hat)/(1-p))`, with `0 log(.) = 0`
/// and `a log(a/0) = inf` for `a > 0`.
pub fn kl_bernoulli(p_hat: f64, p: f64) -> f64 {
    xlogy_ratio(p_hat, p) + xlogy_ratio(1.0 - p_hat, 1.0 - p)
}

fn xlogy_ratio(a: f64, b: f64) -> f64 {
    if a <= 0.0 {
        0.0
    } else if b <= 0.0 {
        f64::INFINITY
    } else {
        a * (a / b).ln()
    }
}

fn logit(t: f64) -> f64 {
    (t / (1.0 - t)).ln()
}

/// Additive weights `(C(t), D(t))`.
pub fn odw_weights(t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::OutOfRange(format!("weight argument t = {t} not in (0, 1)")));
    }
    let l = logit(t);
    let c = (l * l / 2.0).ln_1p() / 2.0;
    let d = (c * c / 2.0).ln_1p() / 2.0;
    Ok((c, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

/// Extreme `p` on the given side of `t` with `K(t, p) <= level`.
///
/// `K(t, .)` is strictly decreasing on `(0, t]` and strictly increasing on
/// `[t, 1)`, so plain bisection applies. The search runs until the bracket
/// stops shrinking in floating point, well below `1e-10`. The returned value
/// always satisfies the constraint. Non-positive levels return `t`.
pub fn kl_invert(t: f64, level: f64, side: Side) -> f64 {
    if !(level > 0.0) {
        return t;
    }
    // `feasible` satisfies K(t, p) <= level, `infeasible` does not.
    let (mut feasible, mut infeasible) = match side {
        Side::Lower => (t, 0.0),
        Side::Upper => (t, 1.0),
    };
    loop {
        let mid = 0.5 * (feasible + infeasible);
        if mid == feasible || mid == infeasible {
            break;
        }
        if kl_bernoulli(t, mid) <= level {
            feasible = mid;
        } else {
            infeasible = mid;
        }
    }
    feasible
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn divergence_conventions() {
        assert_eq!(kl_bernoulli(0.3, 0.3), 0.0);
        assert_eq!(kl_bernoulli(0.5, 0.0), f64::INFINITY);
        assert_eq!(kl_bernoulli(0.0, 0.0), 0.0);
        assert_abs_diff_eq!(kl_bernoulli(0.0, 0.5), 2f64.ln(), epsilon = 1e-15);
        assert_eq!(kl_bernoulli(1.0, 1.0), 0.0);
    }

    #[test]
    fn divergence_hand_value() {
        // 0.5 ln 2 + 0.5 ln(2/3)
        assert_abs_diff_eq!(kl_bernoulli(0.5, 0.25), 0.143841036225890, epsilon = 1e-14);
    }

    #[test]
    fn weights() {
        assert_eq!(odw_weights(0.5).unwrap(), (0.0, 0.0));
        let (c2, d2) = odw_weights(0.2).unwrap();
        let (c8, d8) = odw_weights(0.8).unwrap();
        assert_abs_diff_eq!(c2, c8, epsilon = 1e-15);
        assert_abs_diff_eq!(d2, d8, epsilon = 1e-15);
        let (c, d) = odw_weights(0.9).unwrap();
        assert_abs_diff_eq!(c, 0.613927361995595, epsilon = 1e-12);
        assert_abs_diff_eq!(d, 0.086326400202684, epsilon = 1e-12);
        assert!(odw_weights(0.0).is_err());
        assert!(odw_weights(1.0).is_err());
    }

    #[test]
    fn invert_zero_level() {
        assert_eq!(kl_invert(0.3, 0.0, Side::Lower), 0.3);
        assert_eq!(kl_invert(0.3, 0.0, Side::Upper), 0.3);
    }

    #[test]
    fn invert_huge_level() {
        assert!(kl_invert(0.3, 1e6, Side::Lower) < 1e-300);
        assert!(kl_invert(0.3, 1e6, Side::Upper) > 1.0 - 1e-15);
    }

    #[test]
    fn invert_round_trip_hand_case() {
        let g = kl_bernoulli(0.5, 0.25);
        assert_abs_diff_eq!(kl_invert(0.5, g, Side::Lower), 0.25, epsilon = 1e-9);
        assert_abs_diff_eq!(kl_invert(0.5, g, Side::Upper), 0.75, epsilon = 1e-9);
    }

    proptest::proptest! {
        #[test]
        fn invert_round_trip(t in 0.01f64..0.99, level in 1e-6f64..2.0) {
            for side in [Side::Lower, Side::Upper] {
                let p = kl_invert(t, level, side);
                let k = kl_bernoulli(t, p);
                // near 1, spacing of doubles limits how well 1 - p is resolved
                if p > 1e-12 && p < 1.0 - 1e-6 {
                    proptest::prop_assert!((k - level).abs() < 1e-9, "t={t} level={level} p={p} k={k}");
                }
                proptest::prop_assert!(k <= level);
            }
        }
    }
}
