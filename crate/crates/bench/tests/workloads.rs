//! The benchmarked workloads run and agree with each other at a small size.

use rbm_core::sim::{run_ensemble, run_summary, SimConfig};

#[test]
fn ensemble_and_summary_agree() {
    let cfg = SimConfig::new(1.0, 1.0, 200, 1);
    let samples = run_ensemble(&cfg).unwrap();
    assert_eq!(samples.len(), 200);
    let s = run_summary(&cfg).unwrap();
    let mean_a = samples.iter().map(|x| x.a).sum::<f64>() / 200.0;
    assert_eq!(s.a.count(), 200);
    assert!((s.a.mean() - mean_a).abs() <= 1e-12, "{} vs {mean_a}", s.a.mean());
}
