use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use swlab_bench::bench_state;
use swlab_core::banded::BandedMatrix;
use swlab_core::crossing::ibp_residual;
use swlab_core::oracle::{dense_propagate, DenseConfig};
use swlab_core::{propagate, FourierPotential, PropagatorConfig, Scheme};

fn config(half_width: usize, scheme: Scheme) -> PropagatorConfig {
    PropagatorConfig {
        half_width,
        buffer: 4,
        tol: 1e-9,
        leak_max: 1e-6,
        scheme,
    }
}

fn propagation(c: &mut Criterion) {
    let pot = FourierPotential::cosine(0.25);
    let mut g = c.benchmark_group("propagate_t1");
    for n in [32usize, 64, 128] {
        let psi = bench_state(n, n as i64 / 2);
        let cfg = config(n, Scheme::InteractionPictureRk);
        g.bench_with_input(BenchmarkId::new("interaction_rk", n), &n, |b, _| {
            b.iter(|| propagate(black_box(&psi), 1.0, &pot, &cfg).unwrap())
        });
    }
    let psi = bench_state(32, 16);
    let cfg = config(32, Scheme::MagnusMidpoint);
    g.bench_function("magnus_32", |b| b.iter(|| propagate(black_box(&psi), 1.0, &pot, &cfg).unwrap()));
    g.bench_function("dense_oracle_32_h0.05", |b| {
        b.iter(|| dense_propagate(black_box(&psi), 1.0, &pot, &DenseConfig { half_width: 32, h: 0.05 }).unwrap())
    });
    g.finish();
}

fn operators(c: &mut Criterion) {
    let (pot, _) = FourierPotential::from_positive(&[
        (1, num_complex::Complex64::new(0.3, 0.1)),
        (3, num_complex::Complex64::new(0.1, 0.0)),
    ]);
    let psi = bench_state(256, 200);
    c.bench_function("convolution_256", |b| b.iter(|| pot.apply_convolution(black_box(&psi), 4).unwrap()));
    let v = BandedMatrix::convolution(&pot, 256);
    c.bench_function("banded_apply_256", |b| b.iter(|| v.apply(black_box(psi.amps()))));
    let cfg = config(32, Scheme::InteractionPictureRk).with_tol(1e-10);
    c.bench_function("ibp_residual_6_2", |b| {
        b.iter(|| ibp_residual(6, 2, &FourierPotential::cosine(0.1), &cfg, 1e-8).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = propagation, operators
}
criterion_main!(benches);
