use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use young_bench::density_pair;
use young_core::{
    bilinear_form, convolve_direct, convolve_fast, make_triple, monotone_map, sample_gaussian, GaussianFn,
};

fn convolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("convolution");
    group.sample_size(20);
    for n in [512, 2048] {
        let (f, g) = density_pair(n);
        group.bench_with_input(BenchmarkId::new("direct", n), &n, |b, _| {
            b.iter(|| convolve_direct(black_box(&f), black_box(&g)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fft", n), &n, |b, _| {
            b.iter(|| convolve_fast(black_box(&f), black_box(&g)).unwrap())
        });
    }
    group.finish();
}

fn bilinear(c: &mut Criterion) {
    let t = make_triple(4.0 / 3.0, 4.0 / 3.0).unwrap();
    let (f, g) = density_pair(2048);
    let mut group = c.benchmark_group("bilinear_form");
    group.sample_size(10);
    for n in [256, 1024] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| bilinear_form(black_box(&f), black_box(&g), &t, n).unwrap())
        });
    }
    group.finish();
}

fn transport(c: &mut Criterion) {
    let (f, _) = density_pair(2048);
    let target = sample_gaussian(&GaussianFn::unit_mass(1.0).unwrap(), f.grid())
        .normalized()
        .unwrap();
    c.bench_function("monotone_map/2048", |b| {
        b.iter(|| monotone_map(black_box(&target), black_box(&f)).unwrap())
    });
}

criterion_group!(benches, convolution, bilinear, transport);
criterion_main!(benches);
