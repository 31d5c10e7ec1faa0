//! Filtered link-prediction ranking with MRR and Hits@k.

mod filter;
mod rank;
mod report;

pub use filter::{build_filter_index, FilterIndex};
pub use rank::{evaluate, filtered_rank, raw_rank, Direction, QueryRank};
pub use report::{RankReport, RelationReport, TIE_POLICY};
