use blcband::bands::BandKind;
use blcband::dist::{mixture_normal, AnalyticDist};
use blcband::sim::{run_consistency, run_coverage_with, SimOptions};

#[test]
fn coverage_holds_for_blc_truths() {
    const REPS: usize = 500;
    let floor = 0.9 - 3.0 * (0.9 * 0.1 / REPS as f64).sqrt();
    let opts = SimOptions { n_fill: 256, probes: vec![], ..SimOptions::default() };
    for d in [AnalyticDist::Normal, AnalyticDist::Logistic, AnalyticDist::Exponential, mixture_normal(1.0).unwrap()] {
        let r = run_coverage_with(&d, 100, 0.1, BandKind::Ks, REPS, 17, &opts).unwrap();
        assert!(r.coverage_refined >= floor, "{}: {}", d.name(), r.coverage_refined);
        assert_eq!(r.disagreements, 0, "{}", d.name());
        assert_eq!(r.coverage_raw, r.coverage_refined);
    }
}

#[test]
fn widths_shrink_with_n() {
    let t = run_consistency(&AnalyticDist::Normal, &[50, 200, 800], 0.1, BandKind::Ks, 200, 5).unwrap();
    for w in t.rows.windows(2) {
        assert!(w[1].median_sup_width_refined.unwrap() < w[0].median_sup_width_refined.unwrap());
        assert!(w[1].median_mgf_width.unwrap() < w[0].median_mgf_width.unwrap());
        assert!(w[1].median_sup_width_refined.unwrap() <= w[1].median_sup_width_raw);
    }
}
