//! The subcommands. Each writes its records to `--out` and a metadata
//! sidecar next to it.

use anyhow::{bail, Context, Result};
use blcband::bands::{build_band, massart_kappa, mc_quantile, BandSpec, BandKind};
use blcband::blc_check::{check_blc_iii, check_blc_iv, verdict_grid, verdict_grid_on, Verdict};
use blcband::functionals::{hazard_envelope, mgf_bounds, moment_bounds, HazardKind, LogLinearBand};
use blcband::refine::refine;
use blcband::sim::{run_consistency, run_coverage};
use blcband::{build_grid, BandFn, BoundsInterval, Grid};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{BandArgs, CheckArgs, Cli, Command, FunctionalsArgs, QuantileArgs, SimulateArgs};
use crate::ingest::ingest;
use crate::output::{meta_path, read_csv, write_csv, write_json, BandRow, CheckRow, FunctionalRow, QuantileRow};

/// Outcome of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Done,
    /// The band admits no bi-log-concave distribution function, which is a
    /// statistical conclusion rather than an error.
    Infeasible,
}

pub fn run(cli: &Cli) -> Result<Status> {
    match &cli.command {
        Command::Band(a) => band(cli, a).context("band"),
        Command::Check(a) => check(cli, a).context("check"),
        Command::Functionals(a) => functionals(cli, a).context("functionals"),
        Command::Quantile(a) => quantile(cli, a).context("quantile"),
        Command::Simulate(a) => simulate(cli, a).context("simulate"),
    }
}

fn write_meta(out: &std::path::Path, cli: &Cli, extra: Value) -> Result<()> {
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": cli,
        "result": extra,
    });
    write_json(&meta_path(out), &meta)
}

fn band(cli: &Cli, a: &BandArgs) -> Result<Status> {
    let sample = ingest(&a.input, a.transform, a.censor_offset)?;
    let kind = a.band.kind();
    let (kappa, source) = match a.kappa {
        Some(k) => (k, "given"),
        None => (mc_quantile(kind, sample.len(), a.band.alpha, a.reps, a.seed)?, "monte_carlo"),
    };
    let spec = BandSpec::new(kind, a.band.alpha, kappa)?;
    let grid = build_grid(&sample, a.grid_fill, a.margin)?;
    let raw = build_band(&sample, &grid, &spec)?;
    let r = refine(&raw)?;
    let rows: Vec<BandRow> = (0..grid.len())
        .map(|i| BandRow {
            x: grid.points()[i],
            raw_lower: raw.lower()[i],
            raw_upper: raw.upper()[i],
            refined_lower: r.band.as_ref().map(|b| b.lower()[i]),
            refined_upper: r.band.as_ref().map(|b| b.upper()[i]),
            feasible: r.feasible,
            iterations: r.iterations,
        })
        .collect();
    write_csv(&a.out, &rows)?;
    write_meta(
        &a.out,
        cli,
        json!({
            "n": sample.len(),
            "censored": sample.is_censored(),
            "kappa": kappa,
            "kappa_source": source,
            "grid_points": grid.len(),
            "feasible": r.feasible,
            "iterations": r.iterations,
            "converged": r.converged,
        }),
    )?;
    Ok(if r.feasible { Status::Done } else { Status::Infeasible })
}

fn check_row(dist: &str, criterion: &str, v: &Verdict) -> CheckRow {
    CheckRow {
        dist: dist.to_string(),
        criterion: criterion.to_string(),
        pass: v.pass,
        points: v.points,
        violation_x: v.first_violation.map(|w| w.x),
        violation_margin: v.first_violation.map(|w| w.margin),
    }
}

fn check(cli: &Cli, a: &CheckArgs) -> Result<Status> {
    let dist = a.dist.dist()?;
    let grid = match (a.from, a.to) {
        (Some(lo), Some(hi)) => verdict_grid_on(&dist, lo, hi, a.points)?,
        _ => verdict_grid(&dist)?,
    };
    let name = dist.name();
    let iv = check_blc_iv(&dist, &grid, a.slack)?;
    let iii = check_blc_iii(&dist, &grid, a.slack)?;
    let rows = [check_row(&name, "derivative", &iv), check_row(&name, "hazard", &iii)];
    write_csv(&a.out, &rows)?;
    write_meta(&a.out, cli, json!({ "dist": dist, "grid": [grid.first(), grid.last(), grid.len()] }))?;
    Ok(Status::Done)
}

/// Reads a band file, taking the refined or the raw columns.
pub fn read_band(path: &std::path::Path, raw: bool) -> Result<BandFn> {
    let rows: Vec<BandRow> = read_csv(path)?;
    if rows.is_empty() {
        bail!("{} holds no rows", path.display());
    }
    let grid = Grid::new(rows.iter().map(|r| r.x).collect())?;
    let (lower, upper) = if raw {
        (rows.iter().map(|r| r.raw_lower).collect(), rows.iter().map(|r| r.raw_upper).collect())
    } else {
        if !rows[0].feasible {
            bail!("{} holds an infeasible band; use --raw for the unrefined band", path.display());
        }
        let col = |f: fn(&BandRow) -> Option<f64>| -> Result<Vec<f64>> {
            rows.iter()
                .enumerate()
                .map(|(i, r)| f(r).with_context(|| format!("row {}: missing refined value", i + 1)))
                .collect()
        };
        (col(|r| r.refined_lower)?, col(|r| r.refined_upper)?)
    };
    Ok(BandFn::new(grid, lower, upper)?)
}

fn bounds_row(quantity: &str, param: f64, b: blcband::Result<BoundsInterval>) -> FunctionalRow {
    let finite = |v: f64| v.is_finite().then_some(v);
    match b {
        Ok(b) => FunctionalRow {
            quantity: quantity.into(),
            param,
            lo: finite(b.lo),
            hi: finite(b.hi),
            note: if b.is_bounded() { String::new() } else { "open".into() },
        },
        Err(e) => FunctionalRow { quantity: quantity.into(), param, lo: None, hi: None, note: e.to_string() },
    }
}

fn functionals(cli: &Cli, a: &FunctionalsArgs) -> Result<Status> {
    let band = read_band(&a.band_input, a.raw)?;
    let ll = LogLinearBand::from_band(&band);
    let mut rows = Vec::new();
    for &t in &a.t {
        rows.push(bounds_row("mgf", t, ll.clone().and_then(|ll| mgf_bounds(&ll, t))));
    }
    for &k in &a.moments {
        rows.push(bounds_row("moment", k as f64, ll.clone().and_then(|ll| moment_bounds(&ll, k, a.center))));
    }
    for &x in &a.hazard_x {
        rows.push(bounds_row("hazard", x, hazard_envelope(&band, x, HazardKind::Hazard)));
        rows.push(bounds_row("reverse_hazard", x, hazard_envelope(&band, x, HazardKind::ReverseHazard)));
    }
    write_csv(&a.out, &rows)?;
    let tails = match &ll {
        Ok(ll) => json!({ "gamma_l": ll.gamma_l(), "gamma_r": ll.gamma_r() }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    write_meta(
        &a.out,
        cli,
        json!({
            "tails": tails,
            "moment_center": a.center,
            "moment_bounds_note": "conservative where the moment integrand changes sign (even orders)",
            "open_endpoint_note": "an empty hazard bound with note 'open' is unbounded",
        }),
    )?;
    Ok(Status::Done)
}

fn quantile(cli: &Cli, a: &QuantileArgs) -> Result<Status> {
    let kind = a.band.kind();
    let kappa = mc_quantile(kind, a.n, a.band.alpha, a.reps, a.seed)?;
    let row = QuantileRow {
        kind: kind.name().into(),
        n: a.n,
        alpha: a.band.alpha,
        reps: a.reps,
        seed: a.seed,
        kappa,
    };
    write_csv(&a.out, &[row])?;
    let massart = match kind {
        BandKind::Ks => Some(massart_kappa(a.band.alpha)?),
        _ => None,
    };
    write_meta(&a.out, cli, json!({ "band": kind, "massart_bound": massart }))?;
    Ok(Status::Done)
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Result<Status> {
    let dist = a.dist.dist()?;
    let kind = a.band.kind();
    fn emit<T: Serialize>(cli: &Cli, a: &SimulateArgs, report: &T) -> Result<()> {
        write_json(&a.out, report)?;
        write_meta(&a.out, cli, Value::Null)
    }
    if a.consistency.is_empty() {
        emit(cli, a, &run_coverage(&dist, a.n, a.band.alpha, kind, a.reps, a.seed)?)?;
    } else {
        emit(cli, a, &run_consistency(&dist, &a.consistency, a.band.alpha, kind, a.reps, a.seed)?)?;
    }
    Ok(Status::Done)
}
