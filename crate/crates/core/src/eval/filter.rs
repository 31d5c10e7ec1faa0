use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::kgdata::{TripleStore, Vocab};

/// Known true tails for every `(head, relation)` query, in both directions.
///
/// Relation ids below `base_relations` are forward relations; `r + m` is the
/// reciprocal of `r`. Every triple is indexed as `(h, r) → t` and as its
/// reciprocal, whether or not the source store was augmented.
#[derive(Debug, Clone)]
pub struct FilterIndex {
    tails: HashMap<(usize, usize), Vec<usize>>,
    entity_count: usize,
    base_relations: usize,
}

impl FilterIndex {
    /// Sorted known tails of `(head, relation)`; empty when none are known.
    pub fn known(&self, head: usize, relation: usize) -> &[usize] {
        self.tails.get(&(head, relation)).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, head: usize, relation: usize, tail: usize) -> bool {
        self.known(head, relation).binary_search(&tail).is_ok()
    }

    pub fn query_count(&self) -> usize {
        self.tails.len()
    }

    pub fn entity_count(&self) -> usize {
        self.entity_count
    }

    pub fn base_relation_count(&self) -> usize {
        self.base_relations
    }
}

fn base_labels(store: &TripleStore) -> &[String] {
    &store.relations().labels()[..store.base_relation_count()]
}

fn same_entities(a: &Vocab, b: &Vocab) -> bool {
    std::ptr::eq(a, b) || a == b
}

/// Union of all triples of `stores` (typically train, dev and test).
pub fn build_filter_index(stores: &[&TripleStore]) -> Result<FilterIndex> {
    let first = stores
        .first()
        .ok_or_else(|| Error::config("filter index needs at least one store"))?;
    for (i, store) in stores.iter().enumerate().skip(1) {
        if !same_entities(first.entities(), store.entities()) || base_labels(first) != base_labels(store) {
            return Err(Error::VocabMismatch(format!(
                "store {i} does not share the vocabulary of store 0"
            )));
        }
    }
    let m = first.base_relation_count();
    let mut tails: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for store in stores {
        for t in store.triples() {
            let inverse = if t.relation < m { t.relation + m } else { t.relation - m };
            tails.entry((t.head, t.relation)).or_default().push(t.tail);
            tails.entry((t.tail, inverse)).or_default().push(t.head);
        }
    }
    for list in tails.values_mut() {
        list.sort_unstable();
        list.dedup();
    }
    Ok(FilterIndex {
        tails,
        entity_count: first.entity_count(),
        base_relations: m,
    })
}
