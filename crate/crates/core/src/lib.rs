//! Knowledge-graph completion with network-structure pre-training.
//!
//! The pipeline projects a triple store onto an undirected entity graph,
//! learns entity vectors on that graph ([`pretrain`]), uses them to
//! initialize a tensor-factorization link predictor ([`kgc`]) and scores it
//! with filtered ranking ([`eval`]).

pub mod embedding;
pub mod error;
pub mod eval;
pub mod kgc;
pub mod kgdata;
pub mod math;
pub mod pretrain;
pub mod projection;
pub mod rng;

pub use embedding::EmbeddingMatrix;
pub use error::{Error, Result};
pub use eval::{build_filter_index, evaluate, FilterIndex, RankReport};
pub use kgc::{KgcModelParams, ModelKind, TrainConfig};
pub use kgdata::{
    build_low_resource_split, build_projection_graph, network_stats, parse_triples, Dataset,
    NetworkStats, ProjectionGraph, StatsOptions, Triple, TripleStore, Vocab, Vocabs,
};
pub use pretrain::{Method, PretrainConfig};
pub use projection::{project_2d, Projection2D};
