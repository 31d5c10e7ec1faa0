use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::filter::FilterIndex;
use super::report::RankReport;
use crate::error::{Error, Result};
use crate::kgc::{hidden_vector, relation_matrix, scores_from_hidden, KgcModelParams, ModelKind};
use crate::kgdata::TripleStore;

/// Filtered rank of `true_tail`: one plus the number of entities outside
/// `known` that score strictly higher. `known` must be sorted and contain
/// `true_tail`. Ties count in favor of the true entity.
pub fn filtered_rank(scores: &[f64], true_tail: usize, known: &[usize]) -> Result<usize> {
    if known.binary_search(&true_tail).is_err() {
        return Err(Error::TailNotInFilter { tail: true_tail });
    }
    let target = true_score(scores, true_tail)?;
    let above = scores.iter().filter(|&&s| s > target).count();
    let known_above = known
        .iter()
        .filter(|&&t| t != true_tail && scores.get(t).is_some_and(|&s| s > target))
        .count();
    Ok(1 + above - known_above)
}

/// Unfiltered rank under the same tie rule.
pub fn raw_rank(scores: &[f64], true_tail: usize) -> Result<usize> {
    let target = true_score(scores, true_tail)?;
    Ok(1 + scores.iter().filter(|&&s| s > target).count())
}

fn true_score(scores: &[f64], tail: usize) -> Result<f64> {
    let s = *scores.get(tail).ok_or(Error::IdOutOfRange {
        kind: "entity",
        id: tail,
        size: scores.len(),
    })?;
    if s.is_nan() {
        return Err(Error::NonFiniteScore { tail });
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `(h, r, ?)`
    Tail,
    /// `(?, r, t)`, asked as `(t, r_inv, ?)`
    Head,
}

/// One ranked query. `relation` is the base relation in both directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QueryRank {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
    pub direction: Direction,
    pub rank: usize,
}

/// Ranks every test triple in both directions against the filter.
///
/// `test` may be plain or augmented; only its base triples are used. Ranks
/// are returned tail queries first (in test order), then head queries.
pub fn evaluate(
    params: &KgcModelParams,
    test: &TripleStore,
    filter: &FilterIndex,
    group_by_relation: bool,
) -> Result<RankReport> {
    let m = test.base_relation_count();
    if params.relation_count() < 2 * m {
        return Err(Error::MissingReciprocal {
            expected: 2 * m,
            actual: params.relation_count(),
        });
    }
    if filter.base_relation_count() != m {
        return Err(Error::VocabMismatch(format!(
            "filter has {} base relations, test has {m}",
            filter.base_relation_count()
        )));
    }
    for (what, n) in [("test", test.entity_count()), ("filter", filter.entity_count())] {
        if n != params.entity_count() {
            return Err(Error::VocabMismatch(format!(
                "model has {} entities, {what} has {n}",
                params.entity_count()
            )));
        }
    }

    let base: Vec<_> = test.triples().iter().filter(|t| t.relation < m).collect();
    let n = base.len();
    // Query i < n asks for the tail of base[i]; query n + i asks for its head.
    let mut by_relation: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, t) in base.iter().enumerate() {
        by_relation.entry(t.relation).or_default().push(i);
        by_relation.entry(t.relation + m).or_default().push(n + i);
    }
    let groups: Vec<(usize, Vec<usize>)> = by_relation.into_iter().collect();

    let ranked: Vec<Vec<(usize, usize)>> = groups
        .par_iter()
        .map(|(relation, queries)| {
            let w = (params.kind == ModelKind::Tucker).then(|| relation_matrix(params, *relation));
            let mut scores = vec![0.0; params.entity_count()];
            queries
                .iter()
                .map(|&q| {
                    let t = base[q % n];
                    let (head, answer) = if q < n { (t.head, t.tail) } else { (t.tail, t.head) };
                    let z = hidden_vector(params, head, *relation, w.as_deref());
                    scores_from_hidden(params, &z, &mut scores);
                    Ok((q, filtered_rank(&scores, answer, filter.known(head, *relation))?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut ranks = vec![0; 2 * n];
    for (q, rank) in ranked.into_iter().flatten() {
        ranks[q] = rank;
    }
    let queries: Vec<QueryRank> = ranks
        .iter()
        .enumerate()
        .map(|(q, &rank)| {
            let t = base[q % n];
            QueryRank {
                head: t.head,
                relation: t.relation,
                tail: t.tail,
                direction: if q < n { Direction::Tail } else { Direction::Head },
                rank,
            }
        })
        .collect();
    Ok(RankReport::from_queries(queries, group_by_relation.then(|| test.relations().labels())))
}
