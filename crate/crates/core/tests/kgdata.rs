mod common;

use common::*;
use netpeace_core::kgdata::{
    build_low_resource_split, build_projection_graph, capped_count, network_stats, parse_triples, Dataset,
    ProjectionGraph, StatsOptions,
};
use proptest::prelude::*;

const INF: usize = usize::MAX / 4;

/// All-pairs distances by Floyd–Warshall.
fn floyd(graph: &ProjectionGraph) -> Vec<Vec<usize>> {
    let n = graph.node_count();
    let mut d = vec![vec![INF; n]; n];
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = 0;
        for &v in graph.neighbors(u) {
            row[v] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

fn edges_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..25).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..60)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stats_match_brute_force((n, edges) in edges_strategy()) {
        let graph = ProjectionGraph::from_edges(n, edges).unwrap();
        let stats = network_stats(&graph, &StatsOptions::default()).unwrap();
        let d = floyd(&graph);

        // Components from reachability.
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        for u in 0..n {
            if label[u] == usize::MAX {
                for v in 0..n {
                    if d[u][v] < INF { label[v] = count; }
                }
                count += 1;
            }
        }
        prop_assert_eq!(stats.connected_components, count);
        let sizes: Vec<usize> = (0..count).map(|c| label.iter().filter(|&&l| l == c).count()).collect();
        let largest_size = *sizes.iter().max().unwrap();
        prop_assert_eq!(stats.largest_component_size, largest_size);

        // Paths over ordered pairs of the (first) largest component.
        let largest = sizes.iter().position(|&s| s == largest_size).unwrap();
        let members: Vec<usize> = (0..n).filter(|&v| label[v] == largest).collect();
        let (mut sum, mut pairs, mut diameter) = (0usize, 0usize, 0usize);
        for &u in &members {
            for &v in &members {
                if u != v { sum += d[u][v]; pairs += 1; diameter = diameter.max(d[u][v]); }
            }
        }
        let expected = if pairs == 0 { 0.0 } else { sum as f64 / pairs as f64 };
        prop_assert!((stats.avg_shortest_path - expected).abs() < 1e-12);
        prop_assert_eq!(stats.diameter_estimate, diameter);

        // Local clustering by neighbor-pair enumeration.
        let mut clustering = 0.0;
        for u in 0..n {
            let nb = graph.neighbors(u);
            if nb.len() < 2 { continue; }
            let mut links = 0;
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if d[a][b] == 1 { links += 1; }
                }
            }
            clustering += 2.0 * links as f64 / (nb.len() * (nb.len() - 1)) as f64;
        }
        prop_assert!((stats.avg_clustering - clustering / n as f64).abs() < 1e-12);
        let degree_sum: usize = (0..n).map(|u| graph.degree(u)).sum();
        prop_assert!((stats.avg_degree - degree_sum as f64 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn text_roundtrip(triples in prop::collection::vec((0usize..12, 0usize..4, 0usize..12), 1..40)) {
        let text: String = triples.iter().map(|(h, r, t)| format!("n{h}\tp{r}\tn{t}\n")).collect();
        let store = parse_triples(text.as_bytes(), None).unwrap();
        let mut out = Vec::new();
        store.write_to(&mut out).unwrap();
        prop_assert_eq!(String::from_utf8(out).unwrap(), text.clone());
        let again = parse_triples(text.as_bytes(), Some(store.vocabs())).unwrap();
        prop_assert_eq!(again.triples(), store.triples());
    }

    #[test]
    fn low_resource_sizes_and_caps(seed in 0u64..500, cap in 0usize..30) {
        let ds = random_dataset(seed, 20, 4, 120, 1, 1);
        let counts = ds.train.relation_counts();
        let split = build_low_resource_split(&ds.train, cap, seed);
        prop_assert_eq!(split.len(), capped_count(&counts, cap));
        for (r, &n) in split.relation_counts().iter().enumerate() {
            prop_assert_eq!(n, counts[r].min(cap));
        }
        prop_assert!(split.triples().iter().all(|t| ds.train.contains(t)));
    }

    #[test]
    fn reciprocal_augmentation_doubles(seed in 0u64..500) {
        let ds = random_dataset(seed, 15, 3, 40, 1, 1);
        let aug = ds.train.augment_reciprocal().unwrap();
        prop_assert_eq!(aug.len(), 2 * ds.train.len());
        let m = ds.train.relation_count();
        for t in ds.train.triples() {
            prop_assert!(aug.contains(&netpeace_core::Triple::new(t.tail, t.relation + m, t.head)));
        }
        prop_assert!(aug.augment_reciprocal().is_err());
    }
}

#[test]
fn low_resource_seeds_change_contents_not_counts() {
    let ds = random_dataset(9, 30, 3, 200, 1, 1);
    let a = build_low_resource_split(&ds.train, 20, 1);
    let b = build_low_resource_split(&ds.train, 20, 2);
    assert_eq!(a.len(), b.len());
    assert_ne!(a.triples(), b.triples());
    assert_eq!(build_low_resource_split(&ds.train, 20, 1).triples(), a.triples());
}

#[test]
fn excluding_isolated_nodes() {
    let ds = Dataset::from_texts("a\tr\tb\nb\tr\tc\n", "d\tr\te\n", "a\tr\tc\n").unwrap();
    let graph = build_projection_graph(&ds.train, &[]).unwrap();
    let all = network_stats(&graph, &StatsOptions::default()).unwrap();
    let opts = StatsOptions {
        exclude_isolated: true,
        ..StatsOptions::default()
    };
    let active = network_stats(&graph, &opts).unwrap();
    assert_eq!((all.node_count, all.connected_components), (5, 3));
    assert_eq!((active.node_count, active.connected_components), (3, 1));
    assert!((active.avg_triple_degree - 4.0 / 3.0).abs() < 1e-15);
}
