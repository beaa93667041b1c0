//! Acceptance suite: one test per criterion, one PASS/FAIL line per check.
//!
//! Run with `cargo test -p rbm-core --test acceptance -- --nocapture` to see
//! the lines.

use rbm_core::validation::{run_criterion, run_validation, ValidationConfig};

fn criterion(n: u8) {
    let results = run_criterion(n, &ValidationConfig::default()).expect("valid configuration");
    let mut failed = Vec::new();
    for r in &results {
        println!("{}", r.line());
        if !r.passed {
            failed.push(r.id);
        }
    }
    assert!(failed.is_empty(), "criterion {n} failed: {failed:?}");
}

#[test]
fn criterion_01_w_dual_forms() {
    criterion(1);
}

#[test]
fn criterion_02_occupation_density() {
    criterion(2);
}

#[test]
fn criterion_03_arcsine_limit() {
    criterion(3);
}

#[test]
fn criterion_04_occupation_ldp() {
    criterion(4);
}

#[test]
fn criterion_05_area_moments() {
    criterion(5);
}

#[test]
fn criterion_06_clt() {
    criterion(6);
}

#[test]
fn criterion_07_absarea_moments() {
    criterion(7);
}

#[test]
fn criterion_08_absarea_scgf() {
    criterion(8);
}

#[test]
fn criterion_09_free_absarea() {
    criterion(9);
}

#[test]
fn criterion_10_variational() {
    criterion(10);
}

#[test]
fn criterion_11_stationary_law() {
    criterion(11);
}

#[test]
fn criterion_12_reproducible_reports() {
    let cfg = ValidationConfig::default();
    let in_pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_validation(&cfg).unwrap().to_json())
    };
    let one = in_pool(1);
    let three = in_pool(3);
    let same = one == three;
    println!(
        "criterion 12 {:<36} {}  {} bytes, 1 vs 3 threads",
        "full_report_bytes",
        if same { "PASS" } else { "FAIL" },
        one.len()
    );
    assert!(same, "reports differ between thread counts");
    criterion(12);
}
