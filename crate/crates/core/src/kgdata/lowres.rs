use rand::seq::SliceRandom;

use super::store::TripleStore;
use crate::rng;

/// Keeps at most `cap` triples per relation.
///
/// Each relation's triples are shuffled with their own seeded stream and the
/// first `min(cap, n_r)` are kept, so the output size is `Σ_r min(cap, n_r)`
/// whatever the seed. Kept triples stay in their original file order.
pub fn build_low_resource_split(store: &TripleStore, cap: usize, seed: u64) -> TripleStore {
    let mut by_relation: Vec<Vec<usize>> = vec![Vec::new(); store.relation_count()];
    for (i, t) in store.triples().iter().enumerate() {
        by_relation[t.relation].push(i);
    }
    let mut keep = Vec::new();
    for (relation, mut idx) in by_relation.into_iter().enumerate() {
        if idx.len() > cap {
            idx.shuffle(&mut rng::seeded_stream(seed, relation as u64));
            idx.truncate(cap);
        }
        keep.extend(idx);
    }
    keep.sort_unstable();
    let triples = keep.into_iter().map(|i| store.triples()[i]).collect();
    store.with_triples(triples)
}

/// `Σ_r min(cap, n_r)` for the given per-relation counts.
pub fn capped_count(relation_counts: &[usize], cap: usize) -> usize {
    relation_counts.iter().map(|&n| n.min(cap)).sum()
}
