use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ple_core::boundstate::{disorder_stats, Boundary, DisorderClass, DisorderSpec, Emitter, RealSpaceSpec, Sublattice};
use ple_core::interaction::Kernel;
use ple_core::ising::{ground_exact, IsingInstance};
use ple_core::lattice::HoppingModel;
use ple_core::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn disorder(c: &mut Criterion) {
    let spec = RealSpaceSpec {
        l: 60,
        boundary: Boundary::Open,
        model: HoppingModel::squared_family(0.75),
        emitters: vec![Emitter { cell: 30, sublattice: Sublattice::A, coupling: 0.1, detuning: 0.0 }],
    };
    let dis = DisorderSpec { class: DisorderClass::Breaking, strength: 0.01, realizations: 16, seed: 1 };
    let mut g = c.benchmark_group("disorder_stats");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| disorder_stats(black_box(&spec), &dis, e).unwrap())
        });
    }
    g.finish();
}

fn ising(c: &mut Criterion) {
    let inst = IsingInstance::new(18, Kernel::Ple { xi: 1.0 }).unwrap();
    let mut g = c.benchmark_group("ising_exact");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| ground_exact(black_box(&inst), e).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, disorder, ising);
criterion_main!(benches);
