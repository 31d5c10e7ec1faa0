#![allow(dead_code)]

use std::collections::BTreeSet;

use netpeace_core::kgc::{
    batch_loss, compute_gradients, score_triple, DropoutMasks, KgcModelParams, LabeledBatch, ModelKind,
};
use netpeace_core::{Dataset, FilterIndex, ProjectionGraph, TripleStore};
use netpeace_core::rng::{seeded, ChaCha8Rng};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    seeded(seed)
}

fn to_text(triples: &[(usize, usize, usize)]) -> String {
    triples.iter().map(|(h, r, t)| format!("e{h}\tr{r}\te{t}\n")).collect()
}

/// Random distinct triples split into train/valid/test. Valid and test get
/// at least one triple each.
pub fn random_dataset(seed: u64, n_e: usize, n_r: usize, n_train: usize, n_valid: usize, n_test: usize) -> Dataset {
    let (n_valid, n_test) = (n_valid.max(1), n_test.max(1));
    let mut r = rng(seed);
    let mut seen = BTreeSet::new();
    let mut all = Vec::new();
    let wanted = (n_train + n_valid + n_test).min(n_e * n_e * n_r / 2);
    while all.len() < wanted {
        let t = (r.random_range(0..n_e), r.random_range(0..n_r), r.random_range(0..n_e));
        if t.0 != t.2 && seen.insert(t) {
            all.push(t);
        }
    }
    let (train, rest) = all.split_at(n_train.min(all.len()));
    let (valid, test) = rest.split_at(n_valid.min(rest.len()));
    Dataset::from_texts(&to_text(train), &to_text(valid), &to_text(test)).unwrap()
}

/// Entities in `communities` equal groups. Each relation maps a community to
/// a partner community (itself with probability `intra`), so the tail's
/// community follows from the head's community and the relation.
pub fn community_dataset(seed: u64, n_e: usize, communities: usize, n_r: usize, per_entity: usize, intra: f64) -> Dataset {
    let mut r = rng(seed);
    let size = n_e / communities;
    let partner: Vec<Vec<usize>> = (0..n_r)
        .map(|_| {
            (0..communities)
                .map(|c| if r.random::<f64>() < intra { c } else { r.random_range(0..communities) })
                .collect()
        })
        .collect();
    let mut seen = BTreeSet::new();
    let mut triples = Vec::new();
    for h in 0..n_e {
        let c = (h / size).min(communities - 1);
        for _ in 0..per_entity {
            let rel = r.random_range(0..n_r);
            let target = partner[rel][c];
            let t = target * size + r.random_range(0..size);
            if t != h && seen.insert((h, rel, t)) {
                triples.push((h, rel, t));
            }
        }
    }
    triples.shuffle(&mut r);
    let n_test = triples.len() / 10;
    let (test, rest) = triples.split_at(n_test);
    let (valid, train) = rest.split_at(n_test);
    Dataset::from_texts(&to_text(train), &to_text(valid), &to_text(test)).unwrap()
}

/// Two `k`-cliques joined by the bridge `(k-1)–k`.
pub fn two_cliques(k: usize) -> ProjectionGraph {
    let mut edges = Vec::new();
    for base in [0, k] {
        for i in 0..k {
            for j in i + 1..k {
                edges.push((base + i, base + j));
            }
        }
    }
    edges.push((k - 1, k));
    ProjectionGraph::from_edges(2 * k, edges).unwrap()
}

/// Mean first-order edge probability over intra-clique pairs minus the mean
/// over cross-clique pairs other than the bridge.
pub fn clique_gap(emb: &netpeace_core::EmbeddingMatrix, k: usize) -> f64 {
    use netpeace_core::pretrain::edge_probability;
    let (mut intra, mut n_intra, mut cross, mut n_cross) = (0.0, 0, 0.0, 0);
    for u in 0..2 * k {
        for v in u + 1..2 * k {
            let p = edge_probability(emb.row(u), emb.row(v)).unwrap();
            if (u < k) == (v < k) {
                intra += p;
                n_intra += 1;
            } else if (u, v) != (k - 1, k) {
                cross += p;
                n_cross += 1;
            }
        }
    }
    intra / n_intra as f64 - cross / n_cross as f64
}

/// A batch of every training query (up to `limit`).
pub fn batch_from(store: &TripleStore, limit: usize) -> LabeledBatch {
    let mut batch = LabeledBatch::default();
    for ((h, r), tails) in store.queries().into_iter().take(limit) {
        batch.push(h, r, tails);
    }
    batch
}

fn perturbed(params: &KgcModelParams, block: usize, idx: usize, delta: f64) -> KgcModelParams {
    let mut p = params.clone();
    match block {
        0 => p.entities.values_mut()[idx] += delta,
        1 => p.relations.values_mut()[idx] += delta,
        2 => p.core[idx] += delta,
        3 => p.batchnorm.as_mut().unwrap().head.gamma[idx] += delta,
        4 => p.batchnorm.as_mut().unwrap().head.beta[idx] += delta,
        5 => p.batchnorm.as_mut().unwrap().hidden.gamma[idx] += delta,
        6 => p.batchnorm.as_mut().unwrap().hidden.beta[idx] += delta,
        _ => unreachable!(),
    }
    p
}

/// Largest relative error between analytic gradients and central differences
/// with step `h` over every parameter. Entries where both are below `floor`
/// in magnitude are compared absolutely against `floor`.
pub fn gradient_error(
    params: &KgcModelParams,
    batch: &LabeledBatch,
    masks: Option<&DropoutMasks>,
    label_smoothing: f64,
    h: f64,
    floor: f64,
) -> f64 {
    let (_, grads, _) = compute_gradients(params, batch, masks, label_smoothing).unwrap();
    let mut blocks: Vec<(usize, &[f64])> = vec![(0, &grads.entities), (1, &grads.relations), (2, &grads.core)];
    if let Some(bn) = &grads.batchnorm {
        blocks.extend([
            (3, bn.head_gamma.as_slice()),
            (4, bn.head_beta.as_slice()),
            (5, bn.hidden_gamma.as_slice()),
            (6, bn.hidden_beta.as_slice()),
        ]);
    }
    let mut worst: f64 = 0.0;
    for (block, analytic) in blocks {
        for (idx, &a) in analytic.iter().enumerate() {
            let up = batch_loss(&perturbed(params, block, idx, h), batch, masks, label_smoothing).unwrap();
            let down = batch_loss(&perturbed(params, block, idx, -h), batch, masks, label_smoothing).unwrap();
            let numeric = (up - down) / (2.0 * h);
            let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(floor);
            worst = worst.max(err);
        }
    }
    worst
}

/// Exhaustive filtered ranks: score every candidate, drop known competitors,
/// sort by score (true entity first among ties) and read off the position.
/// Tail queries for every base test triple, then head queries.
pub fn oracle_ranks(params: &KgcModelParams, test: &TripleStore, filter: &FilterIndex) -> Vec<usize> {
    let m = test.base_relation_count();
    let base: Vec<_> = test.triples().iter().filter(|t| t.relation < m).collect();
    let mut queries: Vec<(usize, usize, usize)> = base.iter().map(|t| (t.head, t.relation, t.tail)).collect();
    queries.extend(base.iter().map(|t| (t.tail, t.relation + m, t.head)));
    queries
        .into_iter()
        .map(|(h, r, answer)| {
            let known = filter.known(h, r);
            let mut candidates: Vec<(f64, bool, usize)> = (0..params.entity_count())
                .filter(|t| *t == answer || !known.contains(t))
                .map(|t| (score_triple(params, h, r, t).unwrap(), t == answer, t))
                .collect();
            candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)));
            candidates.iter().position(|c| c.2 == answer).unwrap() + 1
        })
        .collect()
}

/// Random model with one of every kind's valid shapes.
pub fn random_params(kind: ModelKind, n_e: usize, n_r: usize, d: usize, bn: bool, seed: u64) -> KgcModelParams {
    let mut params = KgcModelParams::random(kind, n_e, n_r, d, d, bn, &mut rng(seed)).unwrap();
    if let Some(pair) = params.batchnorm.as_mut() {
        // Move BN away from identity so its parameters matter.
        let mut r = rng(seed ^ 0xb7);
        for layer in [&mut pair.head, &mut pair.hidden] {
            for v in layer.gamma.iter_mut().chain(layer.beta.iter_mut()) {
                *v += r.random_range(-0.5..0.5);
            }
        }
    }
    params
}

pub fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}
