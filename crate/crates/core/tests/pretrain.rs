mod common;

use common::*;
use netpeace_core::pretrain::{
    build_alias_table, edge_probability, generate_walks, line_train, node2vec_step_distribution, pretrain,
    sample_step, sgns_train, sgns_train_logged, Method,
};
use netpeace_core::{PretrainConfig, ProjectionGraph};
use proptest::prelude::*;
use rand::Rng;

fn line_config(method: Method, dim: usize) -> PretrainConfig {
    PretrainConfig {
        method,
        dim,
        total_samples: 200_000,
        ..PretrainConfig::default()
    }
}

fn random_graph(seed: u64, n: usize, edges: usize) -> ProjectionGraph {
    let mut r = rng(seed);
    // A ring keeps every node connected.
    let mut list: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    list.extend((0..edges).map(|_| (r.random_range(0..n), r.random_range(0..n))));
    ProjectionGraph::from_edges(n, list).unwrap()
}

#[test]
fn line1_separates_two_cliques() {
    let emb = line_train(&two_cliques(6), &line_config(Method::Line1, 8)).unwrap();
    let gap = clique_gap(&emb, 6);
    assert!(gap > 0.2, "gap {gap}");
    assert!(emb.is_finite());
}

#[test]
fn line2_ranks_structural_twins_highly() {
    // Nodes 0 and 1 share neighbors 2..=6 and are not adjacent.
    let mut r = rng(3);
    let mut edges: Vec<(usize, usize)> = (2..7).flat_map(|v| [(0, v), (1, v)]).collect();
    edges.extend((0..30).map(|_| (r.random_range(2..20), r.random_range(2..20))));
    edges.extend((7..20).map(|v| (v, 2 + v % 5)));
    let graph = ProjectionGraph::from_edges(20, edges).unwrap();
    assert!(!graph.has_edge(0, 1));
    let emb = line_train(&graph, &line_config(Method::Line2, 16)).unwrap();
    let cosine = |a: usize, b: usize| {
        let (x, y) = (emb.row(a), emb.row(b));
        let dot: f64 = x.iter().zip(y).map(|(p, q)| p * q).sum();
        dot / (x.iter().map(|v| v * v).sum::<f64>().sqrt() * y.iter().map(|v| v * v).sum::<f64>().sqrt())
    };
    let mut all: Vec<f64> = (0..20).flat_map(|a| (a + 1..20).map(move |b| (a, b))).map(|(a, b)| cosine(a, b)).collect();
    all.sort_by(f64::total_cmp);
    let p90 = all[all.len() * 9 / 10];
    assert!(cosine(0, 1) > p90, "twin cosine {} vs p90 {p90}", cosine(0, 1));
}

#[test]
fn line3_is_the_concatenation_of_its_halves() {
    let g = random_graph(1, 30, 40);
    let config = PretrainConfig {
        total_samples: 20_000,
        ..line_config(Method::Line3, 8)
    };
    let both = line_train(&g, &config).unwrap();
    let first = line_train(&g, &PretrainConfig { method: Method::Line1, dim: 4, ..config.clone() }).unwrap();
    let second = line_train(&g, &PretrainConfig { method: Method::Line2, dim: 4, ..config.clone() }).unwrap();
    assert_eq!(both, first.concat_columns(&second).unwrap());
    assert_eq!(line_train(&g, &config).unwrap(), both);
}

#[test]
fn first_steps_match_the_transition_distribution() {
    let g = random_graph(2, 12, 25);
    let (prev, current, p, q) = (0, 1, 0.5, 2.0);
    let probs = node2vec_step_distribution(&g, Some(prev), current, p, q).unwrap();
    let neighbors = g.neighbors(current);
    let trials = 10_000;
    let mut counts = vec![0usize; neighbors.len()];
    let mut r = rng(7);
    for _ in 0..trials {
        let next = sample_step(&g, Some(prev), current, p, q, &mut r);
        counts[neighbors.iter().position(|&v| v == next).unwrap()] += 1;
    }
    for (c, &pr) in counts.iter().zip(&probs) {
        let sigma = (trials as f64 * pr * (1.0 - pr)).sqrt();
        assert!((*c as f64 - trials as f64 * pr).abs() <= 3.0 * sigma, "{counts:?} vs {probs:?}");
    }
}

#[test]
fn walk_corpus_counts_and_determinism() {
    let mut edges: Vec<(usize, usize)> = (0..50).map(|i| (i, (i + 1) % 50)).collect();
    edges.push((3, 17));
    let g = ProjectionGraph::from_edges(52, edges).unwrap();
    let config = PretrainConfig {
        method: Method::Node2Vec,
        walks_per_node: 10,
        walk_length: 12,
        p: 0.5,
        q: 2.0,
        ..PretrainConfig::default()
    };
    let corpus = generate_walks(&g, &config).unwrap();
    assert_eq!(corpus.walks.len(), 500);
    assert_eq!(corpus.skipped_isolated, 2);
    assert!(corpus.walks.iter().all(|w| w.len() == 12));
    assert!(corpus.walks.iter().all(|w| w.windows(2).all(|s| g.has_edge(s[0], s[1]))));
    assert_eq!(generate_walks(&g, &config).unwrap().walks, corpus.walks);
}

#[test]
fn sgns_objective_improves_each_epoch() {
    let g = random_graph(4, 30, 45);
    let config = PretrainConfig {
        method: Method::DeepWalk,
        dim: 16,
        epochs: 5,
        walks_per_node: 4,
        walk_length: 20,
        window: 3,
        ..PretrainConfig::default()
    };
    let corpus = generate_walks(&g, &config).unwrap();
    let (emb, objective) = sgns_train_logged(&corpus, &config, 30).unwrap();
    assert_eq!(objective.len(), 6);
    assert!(objective.windows(2).all(|w| w[1] > w[0]), "{objective:?}");
    assert_eq!(sgns_train(&corpus, &config, 30).unwrap(), emb);
}

#[test]
fn isolated_nodes_are_reported() {
    let g = ProjectionGraph::from_edges(5, [(0, 1), (1, 2)]).unwrap();
    let config = PretrainConfig {
        method: Method::Line1,
        dim: 4,
        total_samples: 100,
        ..PretrainConfig::default()
    };
    assert_eq!(pretrain(&g, &config).unwrap().isolated_nodes, 2);
}

/// 0.999 quantile of chi-square with `k` degrees of freedom (Wilson–Hilferty).
fn chi2_999(k: usize) -> f64 {
    let k = k as f64;
    let z = 3.090_232_306;
    k * (1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt()).powi(3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn alias_sampling_passes_chi_square(weights in prop::collection::vec(0.05f64..10.0, 2..64), seed in any::<u64>()) {
        let table = build_alias_table(&weights).unwrap();
        let total: f64 = weights.iter().sum();
        for (d, w) in table.distribution().iter().zip(&weights) {
            prop_assert!((d - w / total).abs() < 1e-12);
        }
        let draws = 100_000;
        let mut counts = vec![0usize; weights.len()];
        let mut r = rng(seed);
        for _ in 0..draws {
            counts[table.sample(&mut r)] += 1;
        }
        let stat: f64 = counts
            .iter()
            .zip(&weights)
            .map(|(&c, w)| {
                let e = draws as f64 * w / total;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        prop_assert!(stat < chi2_999(weights.len() - 1), "chi2 {stat}");
    }

    #[test]
    fn edge_probability_is_antisymmetric(u in prop::collection::vec(-5.0f64..5.0, 1..10)) {
        let v: Vec<f64> = u.iter().rev().copied().collect();
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let s = edge_probability(&u, &v).unwrap() + edge_probability(&u, &neg).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-15);
    }
}
