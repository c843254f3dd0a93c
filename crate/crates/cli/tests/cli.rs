use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use blcband::dist::AnalyticDist;
use blcband::sim::SimReport;
use blcband_cli::output::{meta_path, read_csv, read_json, write_csv, BandRow, CheckRow, FunctionalRow, QuantileRow};
use tempfile::TempDir;

fn blcband(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blcband")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Normal quantiles at (i - 1/2)/n: a deterministic "sample".
fn normal_data(dir: &Path, n: usize) -> PathBuf {
    let text: String = (1..=n)
        .map(|i| format!("{}\n", AnalyticDist::Normal.quantile((i as f64 - 0.5) / n as f64).unwrap()))
        .collect();
    let p = dir.join("normal.txt");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn band_writes_nested_refinement_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let input = normal_data(dir.path(), 100);
    let out = dir.path().join("band.csv");
    let args = ["band", "--input", path_str(&input), "--alpha", "0.05", "--reps", "2000", "--out", path_str(&out)];
    let first = blcband(&args);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let rows: Vec<BandRow> = read_csv(&out).unwrap();
    assert!(rows.len() > 100);
    for r in &rows {
        assert!(r.feasible);
        let (lo, hi) = (r.refined_lower.unwrap(), r.refined_upper.unwrap());
        assert!(r.raw_lower <= lo && lo <= hi && hi <= r.raw_upper, "{r:?}");
    }
    let bytes = fs::read(&out).unwrap();
    let meta = fs::read(meta_path(&out)).unwrap();

    // re-serializing the parsed rows reproduces the file
    let copy = dir.path().join("copy.csv");
    write_csv(&copy, &rows).unwrap();
    assert_eq!(fs::read(&copy).unwrap(), bytes);

    let again = blcband(&args);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(fs::read(&out).unwrap(), bytes);
    assert_eq!(fs::read(meta_path(&out)).unwrap(), meta);
}

#[test]
fn two_far_clusters_are_infeasible() {
    let dir = TempDir::new().unwrap();
    let text: String = (0..50).map(|i| format!("{}\n{}\n", 0.001 * i as f64, 100.0 + 0.001 * i as f64)).collect();
    let input = dir.path().join("clusters.txt");
    fs::write(&input, text).unwrap();
    let out = dir.path().join("band.csv");
    let o = blcband(&["band", "--input", path_str(&input), "--kappa", "0.3", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<BandRow> = read_csv(&out).unwrap();
    assert!(rows.iter().all(|r| !r.feasible && r.refined_lower.is_none()));
}

#[test]
fn censored_log_data() {
    let dir = TempDir::new().unwrap();
    let text: String = (1..=60).map(|i| format!("{}\n", 1000 + 37 * i)).collect();
    let input = dir.path().join("salaries.txt");
    fs::write(&input, text).unwrap();
    let out = dir.path().join("band.csv");
    let o = blcband(&[
        "band", "--input", path_str(&input), "--transform", "log10", "--censor-offset", "1", "--band", "odw", "--reps", "1000",
        "--out", path_str(&out),
    ]);
    assert!(matches!(o.status.code(), Some(0 | 2)), "{}", String::from_utf8_lossy(&o.stderr));
    let meta: serde_json::Value = read_json(&meta_path(&out)).unwrap();
    assert_eq!(meta["result"]["censored"], true);
    assert_eq!(meta["config"]["command"], "band");
}

#[test]
fn log_of_zero_is_an_error() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("bad.txt");
    fs::write(&input, "10\n1\n").unwrap();
    let out = dir.path().join("band.csv");
    let o = blcband(&["band", "--input", path_str(&input), "--transform", "log10", "--censor-offset", "1", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn check_reports_violation() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("check.csv");
    let o = blcband(&["check", "--dist", "mixture", "--delta", "1.35", "--from", "-8", "--to", "8", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<CheckRow> = read_csv(&out).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!(!r.pass);
        assert!(r.violation_x.is_some());
    }
}

#[test]
fn functionals_of_pinched_exponential() {
    let dir = TempDir::new().unwrap();
    let m = 4001;
    let rows: Vec<BandRow> = (0..m)
        .map(|i| {
            let x = 25.0 * i as f64 / (m - 1) as f64;
            let f = AnalyticDist::Exponential.cdf(x);
            BandRow { x, raw_lower: f, raw_upper: f, refined_lower: Some(f), refined_upper: Some(f), feasible: true, iterations: 1 }
        })
        .collect();
    let band = dir.path().join("pinched.csv");
    write_csv(&band, &rows).unwrap();
    let out = dir.path().join("fun.csv");
    let o = blcband(&[
        "functionals", "--band-input", path_str(&band), "--t", "-0.5,0.5,3", "--moments", "1", "--hazard-x", "2", "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let res: Vec<FunctionalRow> = read_csv(&out).unwrap();
    let mgf = res.iter().find(|r| r.quantity == "mgf" && r.param == 0.5).unwrap();
    assert!((mgf.lo.unwrap() - 2.0).abs() < 1e-3 && (mgf.hi.unwrap() - 2.0).abs() < 1e-3);
    let bad = res.iter().find(|r| r.quantity == "mgf" && r.param == 3.0).unwrap();
    assert!(bad.lo.is_none() && bad.note.contains("gamma_r"));
    let mean = res.iter().find(|r| r.quantity == "moment").unwrap();
    assert!((mean.lo.unwrap() - 1.0).abs() < 1e-3);
    let hz = res.iter().find(|r| r.quantity == "hazard").unwrap();
    // 1 - F near x = 25 is stored with cancellation error, which short
    // secants there amplify to about 1e-3
    assert!((hz.lo.unwrap() - 1.0).abs() < 1e-2 && (hz.hi.unwrap() - 1.0).abs() < 1e-2, "{hz:?}");
}

#[test]
fn quantile_below_massart() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("q.csv");
    let o = blcband(&["quantile", "--n", "100", "--alpha", "0.05", "--reps", "100000", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<QuantileRow> = read_csv(&out).unwrap();
    assert_eq!(rows[0].kind, "ks");
    assert!(rows[0].kappa <= 1.3581015157406195);
}

#[test]
fn simulate_report_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sim.json");
    let o = blcband(&["simulate", "--dist", "logistic", "--n", "30", "--reps", "200", "--alpha", "0.1", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: SimReport = read_json(&out).unwrap();
    assert_eq!(report.replications, 200);
    assert_eq!(report.disagreements, 0);
    let mut text = serde_json::to_string_pretty(&report).unwrap();
    text.push('\n');
    assert_eq!(text, fs::read_to_string(&out).unwrap());
}

#[test]
fn bad_config_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let input = normal_data(dir.path(), 20);
    let out = dir.path().join("band.csv");
    let o = blcband(&["band", "--input", path_str(&input), "--alpha", "0.9", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(1));
}
