//! Parallel vs sequential throughput of the session runner and the
//! Fourier-synthesis oracle. With the default `parallel` feature the
//! session/parallel benches use the rayon path; the sequential entries
//! always run the plain-iterator fallback, so the two can be compared in
//! one invocation:
//!
//!   cargo bench -p fcqkd

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use fcqkd::channel::FiberChannel;
use fcqkd::protocol::{run_session, run_session_sequential, EveConfig, ProtocolConfig};
use fcqkd::wavepacket::{propagate_pulse, PulseParams, TimeGrid};

fn bench_config() -> ProtocolConfig {
    ProtocolConfig {
        channel: FiberChannel {
            loss_db_per_km: 0.0,
            ..ProtocolConfig::default().channel
        },
        eve: EveConfig {
            enabled: true,
            position: 0.0,
            intercept_probability: 0.5,
        },
        ..ProtocolConfig::default()
    }
}

fn session_throughput(c: &mut Criterion) {
    let cfg = bench_config();
    let mut group = c.benchmark_group("session");
    group.sample_size(10);
    for rounds in [10_000u64, 100_000] {
        group.bench_with_input(
            BenchmarkId::new("parallel", rounds),
            &rounds,
            |b, &rounds| b.iter(|| black_box(run_session(&cfg, rounds, 7).unwrap())),
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", rounds),
            &rounds,
            |b, &rounds| {
                b.iter(|| black_box(run_session_sequential(&cfg, rounds, 7).unwrap()))
            },
        );
    }
    group.finish();
}

fn propagation_throughput(c: &mut Criterion) {
    let p = PulseParams::new(1e15, 1e12).unwrap();
    let beta = Complex64::new(1e-27, 0.0);
    let x = 1e4;
    let grid = TimeGrid::default_for(&p, beta, 5e-9, x).unwrap();
    let mut group = c.benchmark_group("propagate");
    group.sample_size(10);
    group.bench_function("sigma_1e12_x_10km", |b| {
        b.iter(|| black_box(propagate_pulse(&p, beta, 5e-9, x, &grid).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, session_throughput, propagation_throughput);
criterion_main!(benches);
