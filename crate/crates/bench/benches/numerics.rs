use criterion::{criterion_group, criterion_main, Criterion};
use rbm_core::analytic::{occupation_density, scaling_w, scgf_a};
use rbm_core::ldp::{
    chi_c, legendre, scgf_c, variational_rate, AbsAreaCgf, CgfProvider, OccupationCgf,
    VariationalProblem,
};
use rbm_core::renewal::{moments_via_renewal, InversionMethod};
use rbm_core::specfun::{airy_ai, airy_h};
use rbm_core::Functional;
use std::hint::black_box;
use std::sync::Arc;

fn special_functions(c: &mut Criterion) {
    let mut g = c.benchmark_group("specfun");
    g.bench_function("scaling_w(5)", |b| b.iter(|| scaling_w(black_box(5.0))));
    g.bench_function("airy_ai(-3)", |b| b.iter(|| airy_ai(black_box(-3.0))));
    g.bench_function("airy_h(2.5)", |b| b.iter(|| airy_h(black_box(2.5))));
    g.bench_function("occupation_density", |b| {
        b.iter(|| occupation_density(black_box(2.0), 5.0, 1.0))
    });
    g.finish();
}

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("renewal");
    for m in [InversionMethod::Talbot, InversionMethod::GaverStehfest] {
        g.bench_function(format!("area moments to order 4, {m:?}"), |b| {
            b.iter(|| moments_via_renewal(Functional::Area, 1.0, black_box(3.0), 4, m))
        });
    }
    g.finish();
}

fn large_deviations(c: &mut Criterion) {
    let mut g = c.benchmark_group("ldp");
    g.sample_size(20);
    g.bench_function("scgf_c(-1, 1)", |b| b.iter(|| scgf_c(black_box(-1.0), 1.0)));
    g.bench_function("chi_c(0.4, 1) cached", |b| {
        b.iter(|| chi_c(black_box(0.4), 1.0))
    });
    let ks: Vec<f64> = (0..1001).map(|i| -6.0 + 12.0 * i as f64 / 1000.0).collect();
    g.bench_function("legendre occupation 1001 k", |b| {
        b.iter(|| legendre(|k| Ok(scgf_a(k, 1.0)), black_box(&ks), None))
    });
    let occ: Arc<dyn CgfProvider> = Arc::new(OccupationCgf);
    g.bench_function("variational occupation 64 nodes", |b| {
        b.iter(|| {
            variational_rate(
                &VariationalProblem::new(occ.clone(), 1.0, black_box(0.8)).with_nodes(64),
            )
        })
    });
    let abs: Arc<dyn CgfProvider> = Arc::new(AbsAreaCgf::new().unwrap());
    g.bench_function("variational absarea 64 nodes", |b| {
        b.iter(|| {
            variational_rate(
                &VariationalProblem::new(abs.clone(), 1.0, black_box(0.5)).with_nodes(64),
            )
        })
    });
    g.finish();
}

criterion_group!(benches, special_functions, transforms, large_deviations);
criterion_main!(benches);
