use super::store::{ensure_same_vocabs, TripleStore};
use crate::error::{Error, Result};

/// Undirected, relation-blind simple graph over entities in compressed row
/// layout. Each adjacency entry also records how many non-self-loop triples
/// connect the pair, so multigraph degrees stay available.
#[derive(Debug, Clone)]
pub struct ProjectionGraph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    multiplicity: Vec<u32>,
    edge_count: usize,
    self_loops: usize,
}

impl ProjectionGraph {
    /// Builds a graph from an undirected edge list. Self-loops are dropped and
    /// repeated pairs (in either orientation) collapse into one edge.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut self_loops = 0;
        for (u, v) in edges {
            for id in [u, v] {
                if id >= node_count {
                    return Err(Error::IdOutOfRange {
                        kind: "node",
                        id,
                        size: node_count,
                    });
                }
            }
            if u == v {
                self_loops += 1;
            } else {
                pairs.push((u.min(v), u.max(v)));
            }
        }
        pairs.sort_unstable();

        let mut unique: Vec<(usize, usize, u32)> = Vec::new();
        for (u, v) in pairs {
            match unique.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 += 1,
                _ => unique.push((u, v, 1)),
            }
        }

        let mut degree = vec![0usize; node_count];
        for &(u, v, _) in &unique {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut neighbors = vec![0; total];
        let mut multiplicity = vec![0; total];
        let mut cursor = offsets[..node_count].to_vec();
        // `unique` is sorted by (u, v) with u < v: a row first receives its
        // smaller neighbors (while earlier rows are processed), then its larger
        // ones, both ascending. Rows come out sorted.
        for &(u, v, m) in &unique {
            neighbors[cursor[u]] = v;
            multiplicity[cursor[u]] = m;
            cursor[u] += 1;
            neighbors[cursor[v]] = u;
            multiplicity[cursor[v]] = m;
            cursor[v] += 1;
        }
        Ok(Self {
            offsets,
            neighbors,
            multiplicity,
            edge_count: unique.len(),
            self_loops,
        })
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Undirected edges after deduplication.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Self-loop triples that were dropped.
    pub fn self_loops(&self) -> usize {
        self.self_loops
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    /// Triple counts parallel to [`neighbors`](Self::neighbors).
    pub fn multiplicities(&self, node: usize) -> &[u32] {
        &self.multiplicity[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|v| self.degree(v)).collect()
    }

    /// Degree counting every connecting triple, as in the multigraph view.
    pub fn triple_degree(&self, node: usize) -> u64 {
        self.multiplicities(node).iter().map(|&m| m as u64).sum()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn is_isolated(&self, node: usize) -> bool {
        self.degree(node) == 0
    }

    /// Both orientations of every undirected edge, in adjacency order.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        (0..self.node_count())
            .flat_map(|u| self.neighbors(u).iter().map(move |&v| (u, v)))
            .collect()
    }
}

/// Projects `store` (plus any `include_splits`) onto an undirected graph with
/// one node per vocabulary entity.
pub fn build_projection_graph(
    store: &TripleStore,
    include_splits: &[&TripleStore],
) -> Result<ProjectionGraph> {
    ensure_same_vocabs(std::iter::once(store).chain(include_splits.iter().copied()))?;
    let edges = std::iter::once(store)
        .chain(include_splits.iter().copied())
        .flat_map(|s| s.triples().iter().map(|t| (t.head, t.tail)));
    ProjectionGraph::from_edges(store.entity_count(), edges)
}
