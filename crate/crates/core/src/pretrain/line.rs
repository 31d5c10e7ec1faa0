use rand::Rng;

use super::config::{Method, PretrainConfig};
use super::negative::{unigram_noise, NegativeSampler, Scratch};
use super::shared::SharedTable;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::kgdata::ProjectionGraph;
use crate::math::{dot, sigmoid};
use crate::rng::{self, ChaCha8Rng};

/// `σ(u·v)`, the probability LINE assigns to an edge between `u` and `v`.
pub fn edge_probability(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    Ok(sigmoid(dot(u, v)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Order {
    First,
    Second,
}

/// Trains LINE embeddings by edge sampling with negative sampling.
///
/// `line3` trains a first-order and a second-order model at `dim / 2` each,
/// both from `config.seed`, and concatenates them row by row.
pub fn line_train(graph: &ProjectionGraph, config: &PretrainConfig) -> Result<EmbeddingMatrix> {
    config.validate()?;
    match config.method {
        Method::Line1 => train_order(graph, config, config.dim, Order::First),
        Method::Line2 => train_order(graph, config, config.dim, Order::Second),
        Method::Line3 => {
            let half = config.dim / 2;
            let first = train_order(graph, config, half, Order::First)?;
            let second = train_order(graph, config, half, Order::Second)?;
            first.concat_columns(&second)
        }
        other => Err(Error::config(format!("{other} is not a LINE variant"))),
    }
}

fn train_order(graph: &ProjectionGraph, config: &PretrainConfig, dim: usize, order: Order) -> Result<EmbeddingMatrix> {
    let edges = graph.directed_edges();
    if edges.is_empty() {
        return Err(Error::NoEdges);
    }
    let n = graph.node_count();
    let noise = unigram_noise((0..n).map(|v| graph.degree(v) as f64))?;

    let mut rng = rng::seeded(config.seed);
    let vertex = SharedTable::from_matrix(&EmbeddingMatrix::uniform(n, dim, 0.5 / dim as f64, &mut rng));
    let context = match order {
        Order::First => None,
        Order::Second => Some(SharedTable::from_matrix(&EmbeddingMatrix::zeros(n, dim))),
    };
    let sampler = NegativeSampler {
        sources: &vertex,
        targets: context.as_ref().unwrap_or(&vertex),
        noise: &noise,
        negatives: config.negatives,
        max_row_norm: config.max_row_norm,
    };

    let threads = config.threads.max(1);
    let total = config.total_samples;
    let run = |rng: &mut ChaCha8Rng, share: u64| {
        let mut buf = Scratch::new(dim);
        for done in 0..share {
            let (u, v) = edges[rng.random_range(0..edges.len())];
            sampler.step(u, v, config.rate_at(done, share), rng, &mut buf);
        }
    };
    if threads == 1 {
        run(&mut rng, total);
    } else {
        std::thread::scope(|scope| {
            for w in 0..threads as u64 {
                let share = total / threads as u64 + u64::from(w < total % threads as u64);
                let run = &run;
                scope.spawn(move || run(&mut rng::seeded_stream(config.seed, w + 1), share));
            }
        });
    }
    Ok(vertex.into_matrix(n))
}
