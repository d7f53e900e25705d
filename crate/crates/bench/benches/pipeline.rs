use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use linefield::analysis::{
    characteristic_constancy, classify_domain, lift, singularity_scan, verify_solution, FieldSource, VerifyOptions,
};
use linefield::grid::rasterize;
use linefield::patterns::exact_tubular_solution;
use linefield_bench::{annulus, ellipse_tube};

fn bench_rasterize(c: &mut Criterion) {
    let mut g = c.benchmark_group("rasterize");
    g.sample_size(10);
    for inv_h in [64u32, 128] {
        g.bench_with_input(BenchmarkId::new("annulus", inv_h), &inv_h, |b, &n| {
            let spec = annulus();
            b.iter(|| rasterize(black_box(&spec), 1.0 / n as f64).unwrap())
        });
    }
    g.finish();
}

fn bench_solution(c: &mut Criterion) {
    let spec = ellipse_tube();
    let grid = rasterize(&spec, 1.0 / 128.0).unwrap();
    let field = exact_tubular_solution(&spec, &grid).unwrap();
    let mut g = c.benchmark_group("ellipse_tube_h128");
    g.sample_size(10);
    g.bench_function("exact_solution", |b| b.iter(|| exact_tubular_solution(&spec, &grid).unwrap()));
    g.bench_function("verify_single", |b| {
        b.iter(|| {
            verify_solution(FieldSource::Given { field: &field, grid: &grid }, &VerifyOptions::default()).unwrap()
        })
    });
    g.bench_function("lift", |b| b.iter(|| lift(black_box(&field)).unwrap()));
    g.bench_function("scan", |b| b.iter(|| singularity_scan(black_box(&field)).unwrap()));
    let m = lift(&field).unwrap().oriented().cloned().unwrap();
    g.bench_function("kinetic_16x64", |b| b.iter(|| characteristic_constancy(&m, 16, 64).unwrap()));
    g.bench_function("classify_256", |b| b.iter(|| classify_domain(&spec, &grid, 256).unwrap()));
    g.finish();
}

criterion_group!(benches, bench_rasterize, bench_solution);
criterion_main!(benches);
