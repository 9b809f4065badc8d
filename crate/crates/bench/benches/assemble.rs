use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use roofgraph::ipbuild::{build, BuildParams};
use roofgraph::model::FeatureConfig;
use roofgraph::pipeline::{assemble, AssembleOptions};
use roofgraph::solver::solve;
use roofgraph_bench::{fixtures, largest};

fn bench_build(c: &mut Criterion) {
    let f = largest(20, 3.0);
    let params = BuildParams::default();
    c.bench_function("build/full", |b| {
        b.iter(|| build(black_box(&f.detections), &FeatureConfig::full(), &params).unwrap())
    });
}

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(20);
    for f in fixtures(4, 3.0) {
        let a = build(&f.detections, &FeatureConfig::full(), &BuildParams::default()).unwrap();
        let id = BenchmarkId::from_parameter(format!("seed{}_v{}", f.seed, f.gt.vertices.len()));
        group.bench_with_input(id, &a.program, |b, p| b.iter(|| solve(black_box(p), Duration::from_secs(60)).unwrap()));
    }
    group.finish();
}

fn bench_ablation(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    group.sample_size(10);
    let f = largest(20, 3.0);
    for features in FeatureConfig::ablation_ladder() {
        let opts = AssembleOptions { features, time_limit: Duration::from_secs(60), ..AssembleOptions::default() };
        group.bench_function(features.label(), |b| b.iter(|| assemble(black_box(&f.detections), &opts).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_build, bench_solve, bench_ablation);
criterion_main!(benches);
