//! Band statistics on uniform order statistics and their Monte Carlo
//! critical values.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use super::{check_alpha, kl_bernoulli, odw_weights, BandKind};
use crate::error::{Error, Result};

/// Smallest replication count accepted by [`mc_quantile`].
pub const MIN_REPS: usize = 1000;

/// Massart's upper bound `sqrt(log(2/alpha)/2)` on the KS critical value.
pub fn massart_kappa(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(((2.0 / alpha).ln() / 2.0).sqrt())
}

fn check_order_stats(u: &[f64]) -> Result<()> {
    if u.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(i) = u.iter().position(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(Error::OutOfRange(format!("order statistic {} = {} not in (0, 1)", i + 1, u[i])));
    }
    if u.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange("order statistics not strictly increasing".into()));
    }
    Ok(())
}

/// `sqrt(n) sup_x |F_n(x) - x|` for sorted uniforms.
pub fn ks_statistic(u: &[f64]) -> Result<f64> {
    check_order_stats(u)?;
    let n = u.len() as f64;
    let d = u.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let above = (i + 1) as f64 / n - x;
        let below = x - i as f64 / n;
        acc.max(above).max(below)
    });
    Ok(n.sqrt() * d)
}

/// `sqrt(n) max_i |U_(i) - t_i| / (t_i(1-t_i))^gamma` with `t_i = i/(n+1)`.
pub fn wks_statistic(u: &[f64], gamma: f64) -> Result<f64> {
    BandKind::Wks { gamma }.validate()?;
    check_order_stats(u)?;
    let n = u.len();
    let m = u.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let t = (i + 1) as f64 / (n + 1) as f64;
        acc.max((x - t).abs() / (t * (1.0 - t)).powf(gamma))
    });
    Ok((n as f64).sqrt() * m)
}

/// `max_j ((n+1) K(t_j, U_(j)) - C(t_j) - nu D(t_j))`.
pub fn odw_statistic(u: &[f64], nu: f64) -> Result<f64> {
    BandKind::Odw { nu }.validate()?;
    check_order_stats(u)?;
    let n = u.len();
    let mut best = f64::NEG_INFINITY;
    for (j, &x) in u.iter().enumerate() {
        let t = (j + 1) as f64 / (n + 1) as f64;
        let (c, d) = odw_weights(t)?;
        best = best.max((n + 1) as f64 * kl_bernoulli(t, x) - c - nu * d);
    }
    Ok(best)
}

pub fn statistic(kind: BandKind, u: &[f64]) -> Result<f64> {
    match kind {
        BandKind::Ks => ks_statistic(u),
        BandKind::Wks { gamma } => wks_statistic(u, gamma),
        BandKind::Odw { nu } => odw_statistic(u, nu),
    }
}

/// Random stream for replication `rep`, independent of scheduling.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Order statistics of `n` independent uniforms, via normalized exponential
/// spacings.
pub fn uniform_order_stats<R: rand::Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = (0..n)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            acc += e;
            acc
        })
        .collect();
    let e: f64 = Exp1.sample(rng);
    let total = acc + e;
    for v in &mut out {
        *v /= total;
    }
    out
}

/// Empirical `(1 - alpha)` quantile (inverse of the empirical distribution
/// function) of `values`, which is sorted in place.
pub fn empirical_quantile(values: &mut [f64], level: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = ((level * values.len() as f64) - 1e-9).ceil().max(1.0) as usize;
    values[k.min(values.len()) - 1]
}

/// Simulated statistics of `reps` replications.
pub fn simulate_statistic(kind: BandKind, n: usize, reps: usize, seed: u64) -> Result<Vec<f64>> {
    kind.validate()?;
    if n == 0 {
        return Err(Error::EmptySample);
    }
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = replication_rng(seed, r as u64);
            let u = uniform_order_stats(n, &mut rng);
            statistic(kind, &u)
        })
        .collect()
}

/// Monte Carlo estimate of the `(1 - alpha)` quantile of the band statistic
/// for sample size `n`. Deterministic in `seed` regardless of thread count.
pub fn mc_quantile(kind: BandKind, n: usize, alpha: f64, reps: usize, seed: u64) -> Result<f64> {
    check_alpha(alpha)?;
    if reps < MIN_REPS {
        return Err(Error::OutOfRange(format!("reps = {reps} below {MIN_REPS}")));
    }
    let mut stats = simulate_statistic(kind, n, reps, seed)?;
    Ok(empirical_quantile(&mut stats, 1.0 - alpha))
}
