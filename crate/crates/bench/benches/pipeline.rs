use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use netpeace_bench::{degree_weights, synthetic_dataset};
use netpeace_core::eval::{build_filter_index, evaluate, filtered_rank};
use netpeace_core::kgc::{score_all_tails, KgcModelParams, ModelKind};
use netpeace_core::kgdata::build_projection_graph;
use netpeace_core::pretrain::{build_alias_table, pretrain, Method, PretrainConfig};
use netpeace_core::rng::seeded;

fn alias(c: &mut Criterion) {
    let weights = degree_weights(1, 100_000);
    c.bench_function("alias/build_100k", |b| b.iter(|| build_alias_table(black_box(&weights)).unwrap()));
    let table = build_alias_table(&weights).unwrap();
    let mut rng = seeded(2);
    c.bench_function("alias/sample", |b| b.iter(|| table.sample(&mut rng)));
}

fn scoring(c: &mut Criterion) {
    let mut group = c.benchmark_group("score_all_tails");
    for kind in [ModelKind::Tucker, ModelKind::DistMult, ModelKind::ComplEx] {
        let d_r = if kind == ModelKind::Tucker { 32 } else { 64 };
        let params = KgcModelParams::random(kind, 5_000, 40, 64, d_r, false, &mut seeded(3)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("{kind:?}")), &params, |b, p| {
            b.iter(|| score_all_tails(p, black_box(17), black_box(5), None).unwrap())
        });
    }
    group.finish();
}

fn ranking(c: &mut Criterion) {
    let scores = degree_weights(4, 15_000);
    let known: Vec<usize> = (0..15_000).step_by(97).collect();
    c.bench_function("filtered_rank/15k", |b| {
        b.iter(|| filtered_rank(black_box(&scores), 1164, &known).unwrap())
    });

    let ds = synthetic_dataset(5, 500, 6, 6_000).augmented().unwrap();
    let filter = build_filter_index(&[&ds.train, &ds.valid, &ds.test]).unwrap();
    let params = KgcModelParams::random(
        ModelKind::Tucker,
        ds.entity_count(),
        ds.relation_count(),
        32,
        16,
        false,
        &mut seeded(6),
    )
    .unwrap();
    c.bench_function("evaluate/500_entities", |b| {
        b.iter(|| evaluate(&params, &ds.test, &filter, false).unwrap())
    });
}

fn line(c: &mut Criterion) {
    let ds = synthetic_dataset(7, 2_000, 8, 20_000);
    let graph = build_projection_graph(&ds.train, &[]).unwrap();
    let mut group = c.benchmark_group("pretrain");
    group.sample_size(10);
    for method in [Method::Line1, Method::Line2] {
        let config = PretrainConfig { method, dim: 64, total_samples: 100_000, ..PretrainConfig::default() };
        group.bench_function(format!("{method:?}/100k_samples"), |b| b.iter(|| pretrain(&graph, &config).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, alias, scoring, ranking, line);
criterion_main!(benches);
