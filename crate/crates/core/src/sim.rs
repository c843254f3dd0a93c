//! Monte Carlo checks of coverage, infeasibility detection and consistency
//! of refined bands.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::band::{eval_band, BandFn};
use crate::bands::quantile::replication_rng;
use crate::bands::{build_band, mc_quantile, BandKind, BandSpec};
use crate::dist::AnalyticDist;
use crate::error::{Error, Result};
use crate::functionals::{hazard_envelope, mgf_bounds, HazardKind, LogLinearBand};
use crate::grid::{build_grid, DEFAULT_FILL, DEFAULT_MARGIN_FRAC};
use crate::refine::{refine_blc, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::sample::Sample;

/// Replications used to calibrate the critical value.
pub const KAPPA_REPS: usize = 100_000;
/// Fewest replications accepted by the harness.
pub const MIN_SIM_REPS: usize = 200;
const KAPPA_SEED: u64 = 0x006b_6170_7061;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub n_fill: usize,
    pub margin_frac: f64,
    pub kappa_reps: usize,
    /// Probability levels at which widths are reported; evaluated at the
    /// true quantiles.
    pub probes: Vec<f64>,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            n_fill: DEFAULT_FILL,
            margin_frac: DEFAULT_MARGIN_FRAC,
            kappa_reps: KAPPA_REPS,
            probes: vec![0.02, 0.1, 0.5, 0.9, 0.98],
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
        }
    }
}

/// Keyed by band kind, `n`, bits of `alpha`, and replications.
type KappaCache = Mutex<HashMap<(String, usize, u64, usize), f64>>;

fn kappa_cache() -> &'static KappaCache {
    static CACHE: OnceLock<KappaCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Monte Carlo critical value for `(kind, n, alpha)`, computed once per
/// process.
pub fn calibrated_kappa(kind: BandKind, n: usize, alpha: f64, reps: usize) -> Result<f64> {
    let key = (format!("{kind:?}"), n, alpha.to_bits(), reps);
    if let Some(&k) = kappa_cache().lock().unwrap().get(&key) {
        return Ok(k);
    }
    let k = mc_quantile(kind, n, alpha, reps, KAPPA_SEED)?;
    kappa_cache().lock().unwrap().insert(key, k);
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub scenario: String,
    pub dist: AnalyticDist,
    pub n: usize,
    pub alpha: f64,
    pub band: BandKind,
    pub kappa: f64,
    pub replications: usize,
    pub seed: u64,
    pub coverage_raw: f64,
    pub coverage_refined: f64,
    /// Replications where the raw and refined bands disagree on containing
    /// the truth.
    pub disagreements: usize,
    pub infeasible_rate: f64,
    pub not_converged: usize,
    pub probes: Vec<f64>,
    pub median_width_raw: Vec<f64>,
    /// Over feasible replications; `None` if there were none.
    pub median_width_refined: Vec<Option<f64>>,
}

struct Rep {
    raw_contains: bool,
    refined_contains: bool,
    feasible: bool,
    converged: bool,
    width_raw: Vec<f64>,
    width_refined: Option<Vec<f64>>,
    raw: BandFn,
    refined: Option<BandFn>,
}

fn widths_at(band: &BandFn, xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let (l, u) = eval_band(band, x);
            u - l
        })
        .collect()
}

fn one_rep(dist: &AnalyticDist, n: usize, spec: &BandSpec, opts: &SimOptions, probe_x: &[f64], seed: u64, rep: usize) -> Result<Rep> {
    let mut rng = replication_rng(seed, rep as u64);
    let sample = Sample::new(dist.sample_n(n, &mut rng))?;
    let grid = build_grid(&sample, opts.n_fill, opts.margin_frac)?;
    let raw = build_band(&sample, &grid, spec)?;
    let truth: Vec<f64> = grid.points().iter().map(|&x| dist.cdf(x)).collect();
    let result = refine_blc(&raw, opts.max_iter, opts.tol)?;
    let refined_contains = result.band.as_ref().is_some_and(|b| b.contains(&truth));
    Ok(Rep {
        raw_contains: raw.contains(&truth),
        refined_contains,
        feasible: result.feasible,
        converged: result.converged,
        width_raw: widths_at(&raw, probe_x),
        width_refined: result.band.as_ref().map(|b| widths_at(b, probe_x)),
        raw,
        refined: result.band,
    })
}

/// `None` for NaN and infinities, which have no JSON representation.
fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Median, ignoring NaN; NaN when nothing is left.
pub fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn run_reps(dist: &AnalyticDist, n: usize, spec: &BandSpec, opts: &SimOptions, probe_x: &[f64], reps: usize, seed: u64) -> Result<Vec<Rep>> {
    (0..reps)
        .into_par_iter()
        .map(|r| one_rep(dist, n, spec, opts, probe_x, seed, r))
        .collect()
}

fn check_sim_args(n: usize, reps: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if reps < MIN_SIM_REPS {
        return Err(Error::OutOfRange(format!("reps = {reps} below {MIN_SIM_REPS}")));
    }
    Ok(())
}

fn probe_points(dist: &AnalyticDist, probes: &[f64]) -> Result<Vec<f64>> {
    probes.iter().map(|&p| dist.quantile(p)).collect()
}

/// Coverage of raw and refined bands for samples of size `n` from `dist`.
pub fn run_coverage(dist: &AnalyticDist, n: usize, alpha: f64, kind: BandKind, reps: usize, seed: u64) -> Result<SimReport> {
    run_coverage_with(dist, n, alpha, kind, reps, seed, &SimOptions::default())
}

pub fn run_coverage_with(
    dist: &AnalyticDist,
    n: usize,
    alpha: f64,
    kind: BandKind,
    reps: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<SimReport> {
    check_sim_args(n, reps)?;
    let kappa = calibrated_kappa(kind, n, alpha, opts.kappa_reps)?;
    let spec = BandSpec::new(kind, alpha, kappa)?;
    let probe_x = probe_points(dist, &opts.probes)?;
    let out = run_reps(dist, n, &spec, opts, &probe_x, reps, seed)?;

    let frac = |count: usize| count as f64 / reps as f64;
    let column = |j: usize, refined: bool| -> Vec<f64> {
        out.iter()
            .filter_map(|r| if refined { r.width_refined.as_ref().map(|w| w[j]) } else { Some(r.width_raw[j]) })
            .collect()
    };
    Ok(SimReport {
        scenario: format!("{}-{}-n{}", dist.name(), kind.name(), n),
        dist: *dist,
        n,
        alpha,
        band: kind,
        kappa,
        replications: reps,
        seed,
        coverage_raw: frac(out.iter().filter(|r| r.raw_contains).count()),
        coverage_refined: frac(out.iter().filter(|r| r.refined_contains).count()),
        disagreements: out.iter().filter(|r| r.raw_contains != r.refined_contains).count(),
        infeasible_rate: frac(out.iter().filter(|r| !r.feasible).count()),
        not_converged: out.iter().filter(|r| r.feasible && !r.converged).count(),
        probes: opts.probes.clone(),
        median_width_raw: (0..probe_x.len()).map(|j| median(&column(j, false))).collect(),
        median_width_refined: (0..probe_x.len()).map(|j| finite(median(&column(j, true)))).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub n: usize,
    pub median_sup_width_raw: f64,
    /// `None` when every replication was infeasible.
    pub median_sup_width_refined: Option<f64>,
    /// Per hazard probe; `None` marks an open envelope.
    pub median_hazard_width: Vec<Option<f64>>,
    pub median_reverse_hazard_width: Vec<Option<f64>>,
    /// Width of the MGF bounds at `mgf_t`; `None` if the bounds do not exist.
    pub median_mgf_width: Option<f64>,
    pub infeasible_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyTable {
    pub dist: AnalyticDist,
    pub alpha: f64,
    pub band: BandKind,
    pub replications: usize,
    pub seed: u64,
    pub hazard_probes: Vec<f64>,
    pub mgf_t: f64,
    pub rows: Vec<ConsistencyRow>,
}

/// Probability levels of the hazard probes used by [`run_consistency`].
pub const HAZARD_PROBES: [f64; 3] = [0.25, 0.5, 0.75];
pub const CONSISTENCY_MGF_T: f64 = 0.25;

fn envelope_width(band: &BandFn, x: f64, kind: HazardKind) -> f64 {
    hazard_envelope(band, x, kind).map_or(f64::INFINITY, |b| b.width())
}

/// Median widths of refined bands and derived bounds as `n` grows.
pub fn run_consistency(dist: &AnalyticDist, n_list: &[usize], alpha: f64, kind: BandKind, reps: usize, seed: u64) -> Result<ConsistencyTable> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange("n_list must be non-empty and increasing".into()));
    }
    let opts = SimOptions { probes: vec![], ..SimOptions::default() };
    let hx = probe_points(dist, &HAZARD_PROBES)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        check_sim_args(n, reps)?;
        let kappa = calibrated_kappa(kind, n, alpha, opts.kappa_reps)?;
        let spec = BandSpec::new(kind, alpha, kappa)?;
        let out = run_reps(dist, n, &spec, &opts, &[], reps, seed)?;
        let feasible: Vec<&BandFn> = out.iter().filter_map(|r| r.refined.as_ref()).collect();
        let hazard = |k: HazardKind| -> Vec<Option<f64>> {
            hx.iter()
                .map(|&x| finite(median(&feasible.iter().map(|b| envelope_width(b, x, k)).collect::<Vec<_>>())))
                .collect()
        };
        let mgf: Vec<f64> = feasible
            .par_iter()
            .map(|b| {
                LogLinearBand::from_band(b)
                    .and_then(|ll| mgf_bounds(&ll, CONSISTENCY_MGF_T))
                    .map_or(f64::INFINITY, |r| r.width())
            })
            .collect();
        rows.push(ConsistencyRow {
            n,
            median_sup_width_raw: median(&out.iter().map(|r| r.raw.max_width()).collect::<Vec<_>>()),
            median_sup_width_refined: finite(median(&feasible.iter().map(|b| b.max_width()).collect::<Vec<_>>())),
            median_hazard_width: hazard(HazardKind::Hazard),
            median_reverse_hazard_width: hazard(HazardKind::ReverseHazard),
            median_mgf_width: finite(median(&mgf)),
            infeasible_rate: out.iter().filter(|r| !r.feasible).count() as f64 / reps as f64,
        });
    }
    Ok(ConsistencyTable {
        dist: *dist,
        alpha,
        band: kind,
        replications: reps,
        seed,
        hazard_probes: HAZARD_PROBES.to_vec(),
        mgf_t: CONSISTENCY_MGF_T,
        rows,
    })
}
