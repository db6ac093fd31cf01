use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use koehler_core::kohler::{find_partners, scan};
use koehler_core::par::Parallelism;
use koehler_core::quadfield::QuadField;
use koehler_core::rayclass::{ray_class_group, Modulus};
use koehler_core::theta::theta_fast;

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)];

fn theta(c: &mut Criterion) {
    let k = QuadField::from_disc(-23).unwrap();
    let xi = ray_class_group(&Modulus::unit(k)).unwrap().character(1).unwrap();
    let mut g = c.benchmark_group("theta_fast");
    for (name, mode) in MODES {
        g.bench_with_input(BenchmarkId::new(name, 50_000), &mode, |b, &m| {
            b.iter(|| theta_fast(black_box(&xi), 50_000, m).unwrap())
        });
    }
    g.finish();
}

fn partners(c: &mut Criterion) {
    let k = QuadField::from_disc(-3).unwrap();
    let m = k.ideal(13, 5, 1).unwrap();
    let xi = ray_class_group(&Modulus::new(k, m).unwrap()).unwrap().character(1).unwrap();
    let mut g = c.benchmark_group("find_partners");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(name, |b| b.iter(|| find_partners(black_box(&xi), None, mode).unwrap()));
    }
    g.finish();
}

fn scanning(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(name, |b| b.iter(|| scan(black_box(60), mode).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, theta, partners, scanning);
criterion_main!(benches);
