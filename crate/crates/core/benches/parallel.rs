//! Sequential vs rayon execution of the data-parallel kernels.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ncswitch::graph::build_enhanced_conflict_graph;
use ncswitch::graph::named::grotzsch;
use ncswitch::par::Exec;
use ncswitch::polytope::{imperfection_ratio, min_speedup_exact, GraphKind};
use ncswitch::rational::Rational;
use ncswitch::scheduler::SchedulerKind;
use ncswitch::sim::{parse_grid, sweep, SimConfig};
use ncswitch::traffic::{special_rate_point, speedup_pattern_2x3};

const EXECS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let config = SimConfig::new(
        special_rate_point(4).unwrap(),
        0.0,
        SchedulerKind::MwssRandomized { candidates: 10 },
        20_000,
        42,
    )
    .with_batching(1000, Rational::new(1, 200));
    let grid = parse_grid("0.1:1.0:0.1").unwrap();
    for (name, exec) in EXECS {
        group.bench_with_input(BenchmarkId::new("special-4", name), &exec, |b, &exec| {
            b.iter(|| sweep(black_box(&config), &grid, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_imperfection(c: &mut Criterion) {
    let mut group = c.benchmark_group("imperfection_ratio");
    group.sample_size(10);
    let graphs = [
        ("grotzsch-10", grotzsch().induced(&(0..10).collect::<Vec<_>>())),
        ("hole-2x3", build_enhanced_conflict_graph(&speedup_pattern_2x3()).unwrap()),
    ];
    for (label, g) in &graphs {
        for (name, exec) in EXECS {
            group.bench_with_input(BenchmarkId::new(*label, name), &exec, |b, &exec| {
                b.iter(|| imperfection_ratio(black_box(g), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_region(c: &mut Criterion) {
    let mut group = c.benchmark_group("min_speedup_exact");
    group.sample_size(10);
    let patterns = [("special-3", special_rate_point(3).unwrap()), ("hole-2x3", speedup_pattern_2x3())];
    for (label, tp) in &patterns {
        for (name, exec) in EXECS {
            group.bench_with_input(BenchmarkId::new(*label, name), &exec, |b, &exec| {
                b.iter(|| min_speedup_exact(black_box(tp), GraphKind::Enhanced, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_imperfection, bench_region);
criterion_main!(benches);
