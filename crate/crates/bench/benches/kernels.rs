use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use toric_mellin::bargmann::{spectral_measure, WeightData};
use toric_mellin::distribution::{superlevel_volume_exact, LevelSetProblem};
use toric_mellin::gk::g_polynomial;
use toric_mellin::mellin::{transform_quadrature, transform_series, TestFunction};
use toric_mellin::polytope::{riemann_sum, EmExpansion, HPolytope};
use toric_mellin::quadrature::gauss_laguerre_general;

fn gk(c: &mut Criterion) {
    let mut group = c.benchmark_group("g_polynomial");
    for k in [10u32, 20, 30] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| b.iter(|| g_polynomial(black_box(k))));
    }
    group.finish();
}

fn laguerre(c: &mut Criterion) {
    c.bench_function("gauss_laguerre_general/80", |b| {
        b.iter(|| gauss_laguerre_general(black_box(80), black_box(12.5)).unwrap())
    });
}

fn transform(c: &mut Criterion) {
    let f = TestFunction::gaussian(vec![0.8, 1.2], 0.4).unwrap();
    let x = [1.0, 1.0];
    c.bench_function("transform_quadrature/gaussian_2d", |b| {
        b.iter(|| transform_quadrature(&f, black_box(&x), black_box(200.0)).unwrap())
    });
    c.bench_function("transform_series/gaussian_2d_order_2", |b| {
        b.iter(|| transform_series(&f, black_box(&x), black_box(200.0), 2).unwrap())
    });
}

fn polytope(c: &mut Criterion) {
    let p = HPolytope::standard_simplex(2);
    let f = TestFunction::gaussian(vec![0.2, 0.4], 0.7).unwrap();
    c.bench_function("riemann_sum/triangle_N64", |b| b.iter(|| riemann_sum(&f, &p, black_box(64)).unwrap()));
    c.bench_function("em_expansion/triangle_order_2", |b| b.iter(|| EmExpansion::new(&f, &p, 2).unwrap()));
}

fn spectral(c: &mut Criterion) {
    let w = WeightData::unit(2, 1).unwrap();
    let f = TestFunction::gaussian(vec![0.4, 0.6], 0.5).unwrap();
    c.bench_function("spectral_measure/unit2_N30", |b| b.iter(|| spectral_measure(&f, &w, black_box(30)).unwrap()));
}

fn level_sets(c: &mut Criterion) {
    let one = LevelSetProblem::new(100_000, &[100_000], 0.0).unwrap();
    let two = LevelSetProblem::new(10_000, &[10_000, 0], 0.0).unwrap();
    c.bench_function("superlevel_volume/d1", |b| b.iter(|| superlevel_volume_exact(black_box(&one)).unwrap()));
    c.bench_function("superlevel_volume/d2_degenerate", |b| {
        b.iter(|| superlevel_volume_exact(black_box(&two)).unwrap())
    });
}

criterion_group!(benches, gk, laguerre, transform, polytope, spectral, level_sets);
criterion_main!(benches);
