use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::ProjectionGraph;
use crate::error::{Error, Result};
use crate::rng;

/// Sources used for path statistics when a component is larger than this.
pub const DEFAULT_PATH_SAMPLE_SIZE: usize = 5_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsOptions {
    /// Maximum number of BFS sources in the largest component.
    pub path_sample_size: usize,
    pub seed: u64,
    /// Compute everything over non-isolated nodes only.
    pub exclude_isolated: bool,
}

impl Default for StatsOptions {
    fn default() -> Self {
        Self {
            path_sample_size: DEFAULT_PATH_SAMPLE_SIZE,
            seed: 0,
            exclude_isolated: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    /// Nodes the statistics are computed over.
    pub node_count: usize,
    pub isolated_nodes: usize,
    pub isolated_excluded: bool,
    pub edge_count: usize,
    pub connected_components: usize,
    pub largest_component_size: usize,
    /// `2 * edge_count / node_count` over the deduplicated graph.
    pub avg_degree: f64,
    /// Mean degree counting every connecting triple (multigraph view).
    pub avg_triple_degree: f64,
    /// Mean local clustering; nodes with degree below 2 contribute 0.
    pub avg_clustering: f64,
    pub avg_shortest_path: f64,
    pub diameter_estimate: usize,
    pub path_sources: usize,
    pub sampled: bool,
}

/// Computes component, degree, clustering and path statistics.
pub fn network_stats(graph: &ProjectionGraph, options: &StatsOptions) -> Result<NetworkStats> {
    if options.path_sample_size == 0 {
        return Err(Error::config("path_sample_size must be at least 1"));
    }
    let n = graph.node_count();
    let isolated_nodes = (0..n).filter(|&v| graph.is_isolated(v)).count();
    let counted = |v: usize| !(options.exclude_isolated && graph.is_isolated(v));
    let node_count = if options.exclude_isolated {
        n - isolated_nodes
    } else {
        n
    };
    if node_count == 0 {
        return Err(Error::EmptyGraph);
    }

    let (component_of, sizes) = components(graph);
    // Isolated nodes are exactly the singleton components.
    let connected_components = if options.exclude_isolated {
        sizes.len() - isolated_nodes
    } else {
        sizes.len()
    };
    let largest = (0..sizes.len())
        .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
        .expect("non-empty graph has a component");

    let triangles = triangle_counts(graph);
    let mut clustering_sum = 0.0;
    let mut triple_degree_sum = 0u64;
    for v in (0..n).filter(|&v| counted(v)) {
        let d = graph.degree(v) as f64;
        if d >= 2.0 {
            clustering_sum += 2.0 * triangles[v] as f64 / (d * (d - 1.0));
        }
        triple_degree_sum += graph.triple_degree(v);
    }

    let mut members: Vec<usize> = (0..n).filter(|&v| component_of[v] == largest).collect();
    let sampled = options.path_sample_size < members.len();
    if sampled {
        let mut rng = rng::seeded(options.seed);
        members.shuffle(&mut rng);
        members.truncate(options.path_sample_size);
        members.sort_unstable();
    }
    let per_source: Vec<(u64, u64, usize)> = members
        .par_iter()
        .map(|&s| bfs_summary(graph, s))
        .collect();
    let (dist_sum, pairs, diameter) = per_source
        .iter()
        .fold((0u64, 0u64, 0usize), |(s, p, d), &(ss, pp, dd)| (s + ss, p + pp, d.max(dd)));

    Ok(NetworkStats {
        node_count,
        isolated_nodes,
        isolated_excluded: options.exclude_isolated,
        edge_count: graph.edge_count(),
        connected_components,
        largest_component_size: sizes[largest],
        avg_degree: 2.0 * graph.edge_count() as f64 / node_count as f64,
        avg_triple_degree: triple_degree_sum as f64 / node_count as f64,
        avg_clustering: clustering_sum / node_count as f64,
        avg_shortest_path: if pairs == 0 {
            0.0
        } else {
            dist_sum as f64 / pairs as f64
        },
        diameter_estimate: diameter,
        path_sources: members.len(),
        sampled,
    })
}

/// Component label per node (labels in order of smallest member) and sizes.
pub fn components(graph: &ProjectionGraph) -> (Vec<usize>, Vec<usize>) {
    let n = graph.node_count();
    let mut label = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let c = sizes.len();
        label[start] = c;
        queue.push_back(start);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in graph.neighbors(u) {
                if label[v] == usize::MAX {
                    label[v] = c;
                    queue.push_back(v);
                }
            }
        }
        sizes.push(size);
    }
    (label, sizes)
}

/// Triangles through each node, via degree-ordered forward counting.
pub fn triangle_counts(graph: &ProjectionGraph) -> Vec<u64> {
    let n = graph.node_count();
    let rank = |v: usize| (graph.degree(v), v);
    let forward: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            graph
                .neighbors(u)
                .iter()
                .copied()
                .filter(|&v| rank(v) > rank(u))
                .collect()
        })
        .collect();
    let mut tri = vec![0u64; n];
    let mut mark = vec![false; n];
    for u in 0..n {
        for &v in &forward[u] {
            mark[v] = true;
        }
        for &v in &forward[u] {
            for &w in &forward[v] {
                if mark[w] {
                    tri[u] += 1;
                    tri[v] += 1;
                    tri[w] += 1;
                }
            }
        }
        for &v in &forward[u] {
            mark[v] = false;
        }
    }
    tri
}

/// (sum of distances, reachable nodes excluding source, eccentricity).
fn bfs_summary(graph: &ProjectionGraph, source: usize) -> (u64, u64, usize) {
    let mut dist = vec![usize::MAX; graph.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    let (mut sum, mut count, mut ecc) = (0u64, 0u64, 0usize);
    while let Some(u) = queue.pop_front() {
        let du = dist[u];
        for &v in graph.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = du + 1;
                sum += (du + 1) as u64;
                count += 1;
                ecc = ecc.max(du + 1);
                queue.push_back(v);
            }
        }
    }
    (sum, count, ecc)
}
