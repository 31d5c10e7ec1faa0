use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::rank::{Direction, QueryRank};
use crate::error::Result;
use crate::kgdata::TripleStore;

pub const TIE_POLICY: &str = "optimistic: only strictly higher-scored candidates outrank the true entity";

/// Aggregated filtered-ranking metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub mrr: f64,
    pub hits1: f64,
    pub hits3: f64,
    pub hits10: f64,
    pub n_queries: usize,
    pub tie_policy: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_relation: Option<Vec<RelationReport>>,
    /// Ranks in query order; written separately with [`RankReport::write_rank_dump`].
    #[serde(skip)]
    pub per_triple_ranks: Vec<usize>,
    #[serde(skip)]
    pub queries: Vec<QueryRank>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationReport {
    pub relation: usize,
    pub label: String,
    pub count: usize,
    pub mrr: f64,
    pub hits1: f64,
    pub hits3: f64,
    pub hits10: f64,
}

/// Metrics from a rank histogram. Summing in rank order makes the result
/// independent of query order.
struct Metrics {
    count: usize,
    mrr: f64,
    hits: [f64; 3],
}

impl Metrics {
    fn from_ranks<'a>(ranks: impl IntoIterator<Item = &'a usize>) -> Self {
        let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
        for &r in ranks {
            *histogram.entry(r).or_default() += 1;
        }
        let count: usize = histogram.values().sum();
        if count == 0 {
            return Self { count, mrr: 0.0, hits: [0.0; 3] };
        }
        let reciprocal: f64 = histogram.iter().map(|(&r, &c)| c as f64 / r as f64).sum();
        let within = |k: usize| histogram.range(..=k).map(|(_, &c)| c).sum::<usize>() as f64 / count as f64;
        Self {
            count,
            mrr: reciprocal / count as f64,
            hits: [within(1), within(3), within(10)],
        }
    }
}

impl RankReport {
    /// Aggregates a plain list of ranks.
    pub fn from_ranks(ranks: Vec<usize>) -> Self {
        let m = Metrics::from_ranks(&ranks);
        Self {
            mrr: m.mrr,
            hits1: m.hits[0],
            hits3: m.hits[1],
            hits10: m.hits[2],
            n_queries: m.count,
            tie_policy: TIE_POLICY,
            per_relation: None,
            per_triple_ranks: ranks,
            queries: Vec::new(),
        }
    }

    /// Aggregates ranked queries; with `relation_labels`, also per base relation.
    pub fn from_queries(queries: Vec<QueryRank>, relation_labels: Option<&[String]>) -> Self {
        let ranks = queries.iter().map(|q| q.rank).collect();
        let mut report = Self::from_ranks(ranks);
        report.per_relation = relation_labels.map(|labels| {
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for q in &queries {
                groups.entry(q.relation).or_default().push(q.rank);
            }
            groups
                .into_iter()
                .map(|(relation, ranks)| {
                    let m = Metrics::from_ranks(&ranks);
                    RelationReport {
                        relation,
                        label: labels.get(relation).cloned().unwrap_or_default(),
                        count: m.count,
                        mrr: m.mrr,
                        hits1: m.hits[0],
                        hits3: m.hits[1],
                        hits10: m.hits[2],
                    }
                })
                .collect()
        });
        report.queries = queries;
        report
    }

    /// Tab-separated `head relation tail direction rank` lines, labels taken
    /// from `store`.
    pub fn write_rank_dump<W: Write>(&self, store: &TripleStore, mut out: W) -> Result<()> {
        let (entities, relations) = (store.entities().labels(), store.relations().labels());
        writeln!(out, "head\trelation\ttail\tdirection\trank")?;
        for q in &self.queries {
            let direction = match q.direction {
                Direction::Tail => "tail",
                Direction::Head => "head",
            };
            writeln!(
                out,
                "{}\t{}\t{}\t{direction}\t{}",
                entities[q.head], relations[q.relation], entities[q.tail], q.rank
            )?;
        }
        Ok(())
    }
}
