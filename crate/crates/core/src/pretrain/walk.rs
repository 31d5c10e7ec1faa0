use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::config::{Method, PretrainConfig};
use crate::error::{Error, Result};
use crate::kgdata::ProjectionGraph;
use crate::rng;

/// Random-walk corpus plus the number of isolated nodes that started no walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkCorpus {
    pub walks: Vec<Vec<usize>>,
    pub skipped_isolated: usize,
}

impl WalkCorpus {
    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }
}

#[inline]
fn step_weight(graph: &ProjectionGraph, prev: usize, next: usize, p: f64, q: f64) -> f64 {
    if next == prev {
        1.0 / p
    } else if graph.has_edge(prev, next) {
        1.0
    } else {
        1.0 / q
    }
}

/// node2vec transition probabilities from `current` given the previous node,
/// aligned with `graph.neighbors(current)`.
pub fn node2vec_step_distribution(
    graph: &ProjectionGraph,
    prev: Option<usize>,
    current: usize,
    p: f64,
    q: f64,
) -> Result<Vec<f64>> {
    let neighbors = graph.neighbors(current);
    if neighbors.is_empty() {
        return Err(Error::IsolatedNode(current));
    }
    let weights: Vec<f64> = match prev {
        None => vec![1.0; neighbors.len()],
        Some(prev) => neighbors
            .iter()
            .map(|&x| step_weight(graph, prev, x, p, q))
            .collect(),
    };
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Draws the next node by rejection against the largest of `1/p, 1, 1/q`.
/// `current` must have at least one neighbor.
pub fn sample_step<R: Rng + ?Sized>(
    graph: &ProjectionGraph,
    prev: Option<usize>,
    current: usize,
    p: f64,
    q: f64,
    rng: &mut R,
) -> usize {
    let neighbors = graph.neighbors(current);
    let pick = |rng: &mut R| neighbors[rng.random_range(0..neighbors.len())];
    let prev = match prev {
        Some(prev) if p != 1.0 || q != 1.0 => prev,
        _ => return pick(rng),
    };
    let bound = (1.0 / p).max(1.0).max(1.0 / q);
    loop {
        let next = pick(rng);
        if rng.random::<f64>() * bound < step_weight(graph, prev, next, p, q) {
            return next;
        }
    }
}

/// `walks_per_node` rounds over the non-isolated nodes, each round in a
/// freshly shuffled order. Every walk draws from its own stream of the seed,
/// so the corpus does not depend on how the walks are scheduled.
pub fn generate_walks(graph: &ProjectionGraph, config: &PretrainConfig) -> Result<WalkCorpus> {
    config.validate()?;
    let (p, q) = match config.method {
        Method::DeepWalk => (1.0, 1.0),
        _ => (config.p, config.q),
    };
    let starts: Vec<usize> = (0..graph.node_count()).filter(|&v| !graph.is_isolated(v)).collect();
    let skipped_isolated = graph.node_count() - starts.len();

    let mut order_rng = rng::seeded(config.seed);
    let mut jobs = Vec::with_capacity(starts.len() * config.walks_per_node);
    for _ in 0..config.walks_per_node {
        let mut round = starts.clone();
        round.shuffle(&mut order_rng);
        jobs.extend(round);
    }

    let walk_seed = rng::mix_seed(config.seed, 0x5741_4c4b);
    let walks = jobs
        .par_iter()
        .enumerate()
        .map(|(i, &start)| {
            let mut rng = rng::seeded_stream(walk_seed, i as u64);
            let mut walk = Vec::with_capacity(config.walk_length);
            walk.push(start);
            let mut prev = None;
            while walk.len() < config.walk_length {
                let current = *walk.last().unwrap();
                if graph.is_isolated(current) {
                    break;
                }
                let next = sample_step(graph, prev, current, p, q, &mut rng);
                prev = Some(current);
                walk.push(next);
            }
            walk
        })
        .collect();
    Ok(WalkCorpus {
        walks,
        skipped_isolated,
    })
}
