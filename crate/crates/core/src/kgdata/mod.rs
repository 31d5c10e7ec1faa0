//! Triple files, vocabularies, the entity projection graph and its statistics.

mod dataset;
mod graph;
mod lowres;
mod stats;
mod store;
mod vocab;

pub use dataset::{Dataset, TEST_FILE, TRAIN_FILE, VALID_FILE};
pub use graph::{build_projection_graph, ProjectionGraph};
pub use lowres::{build_low_resource_split, capped_count};
pub use stats::{
    components, network_stats, triangle_counts, NetworkStats, StatsOptions,
    DEFAULT_PATH_SAMPLE_SIZE,
};
pub use store::{
    ensure_same_vocabs, parse_triples, scan_labels, Triple, TripleStore, Vocabs,
    RECIPROCAL_SUFFIX,
};
pub use vocab::Vocab;
