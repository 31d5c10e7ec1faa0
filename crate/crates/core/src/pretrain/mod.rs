//! Entity pre-training on the projection graph: LINE (first order, second
//! order, concatenated) and random-walk skip-gram (DeepWalk, node2vec).

mod alias;
mod config;
mod line;
mod negative;
mod sgns;
mod shared;
mod walk;

pub use alias::AliasTable;
pub use config::{Method, PretrainConfig};
pub use line::{edge_probability, line_train};
pub use sgns::{sgns_train, sgns_train_logged, window_pairs};
pub use walk::{generate_walks, node2vec_step_distribution, sample_step, WalkCorpus};

use crate::embedding::EmbeddingMatrix;
use crate::error::Result;
use crate::kgdata::ProjectionGraph;

/// Result of [`pretrain`].
#[derive(Debug, Clone)]
pub struct PretrainOutput {
    pub embeddings: EmbeddingMatrix,
    /// Nodes without neighbors; their rows keep the random initialization.
    pub isolated_nodes: usize,
}

/// Runs the configured method over `graph`.
pub fn pretrain(graph: &ProjectionGraph, config: &PretrainConfig) -> Result<PretrainOutput> {
    config.validate()?;
    let isolated_nodes = (0..graph.node_count()).filter(|&v| graph.is_isolated(v)).count();
    let embeddings = if config.method.is_line() {
        line_train(graph, config)?
    } else {
        let corpus = generate_walks(graph, config)?;
        sgns_train(&corpus, config, graph.node_count())?
    };
    Ok(PretrainOutput {
        embeddings,
        isolated_nodes,
    })
}

pub fn build_alias_table(weights: &[f64]) -> Result<AliasTable> {
    AliasTable::new(weights)
}
