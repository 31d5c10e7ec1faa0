use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};
use std::sync::Arc;

use super::vocab::Vocab;
use crate::error::{Error, Result};

/// Suffix appended to a relation label to name its reciprocal.
pub const RECIPROCAL_SUFFIX: &str = "_reverse";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
}

impl Triple {
    pub const fn new(head: usize, relation: usize, tail: usize) -> Self {
        Self {
            head,
            relation,
            tail,
        }
    }
}

/// Entity and relation vocabularies shared between the splits of a dataset.
#[derive(Debug, Clone)]
pub struct Vocabs {
    pub entities: Arc<Vocab>,
    pub relations: Arc<Vocab>,
}

impl Vocabs {
    pub fn new(entities: Vocab, relations: Vocab) -> Self {
        Self {
            entities: Arc::new(entities),
            relations: Arc::new(relations),
        }
    }

    pub fn same_as(&self, other: &Vocabs) -> bool {
        (Arc::ptr_eq(&self.entities, &other.entities) || self.entities == other.entities)
            && (Arc::ptr_eq(&self.relations, &other.relations)
                || self.relations == other.relations)
    }
}

/// Ordered triple list plus a deduplicated membership view.
#[derive(Debug, Clone)]
pub struct TripleStore {
    triples: Vec<Triple>,
    vocabs: Vocabs,
    known: HashSet<Triple>,
    base_relations: usize,
    augmented: bool,
}

fn split_line(line: &str, line_no: usize) -> Result<Option<[&str; 3]>> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    if line.trim().is_empty() {
        return Ok(None);
    }
    let mut fields = line.split('\t');
    match (fields.next(), fields.next(), fields.next(), fields.next()) {
        (Some(h), Some(r), Some(t), None) if !h.is_empty() && !r.is_empty() && !t.is_empty() => {
            Ok(Some([h, r, t]))
        }
        _ => Err(Error::Parse {
            line: line_no,
            message: format!(
                "expected 3 tab-separated fields, found {}",
                line.split('\t').count()
            ),
        }),
    }
}

/// Adds every label in `reader` to the vocabularies without storing triples.
pub fn scan_labels<R: BufRead>(
    reader: R,
    entities: &mut Vocab,
    relations: &mut Vocab,
) -> Result<usize> {
    let mut count = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if let Some([h, r, t]) = split_line(&line, i + 1)? {
            entities.insert(h);
            relations.insert(r);
            entities.insert(t);
            count += 1;
        }
    }
    Ok(count)
}

/// Parses tab-separated `head\trelation\ttail` lines.
///
/// With `existing`, every label must already be known (dev/test files parsed
/// against the training vocabulary). Without it, ids are assigned in order of
/// first appearance.
pub fn parse_triples<R: BufRead>(reader: R, existing: Option<&Vocabs>) -> Result<TripleStore> {
    let mut triples = Vec::new();
    match existing {
        Some(vocabs) => {
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                let Some([h, r, t]) = split_line(&line, i + 1)? else {
                    continue;
                };
                let lookup = |vocab: &Vocab, label: &str| {
                    vocab.id(label).ok_or_else(|| Error::OutOfVocabulary {
                        line: i + 1,
                        label: label.to_string(),
                    })
                };
                triples.push(Triple::new(
                    lookup(&vocabs.entities, h)?,
                    lookup(&vocabs.relations, r)?,
                    lookup(&vocabs.entities, t)?,
                ));
            }
            if triples.is_empty() {
                return Err(Error::EmptyDataset);
            }
            Ok(TripleStore::from_parts(triples, vocabs.clone()))
        }
        None => {
            let mut entities = Vocab::new();
            let mut relations = Vocab::new();
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                let Some([h, r, t]) = split_line(&line, i + 1)? else {
                    continue;
                };
                let h = entities.insert(h);
                let r = relations.insert(r);
                let t = entities.insert(t);
                triples.push(Triple::new(h, r, t));
            }
            if triples.is_empty() {
                return Err(Error::EmptyDataset);
            }
            Ok(TripleStore::from_parts(
                triples,
                Vocabs::new(entities, relations),
            ))
        }
    }
}

impl TripleStore {
    /// Builds a store over existing vocabularies. Ids are validated.
    pub fn new(triples: Vec<Triple>, vocabs: Vocabs) -> Result<Self> {
        let (n_e, n_r) = (vocabs.entities.len(), vocabs.relations.len());
        for t in &triples {
            for (kind, id, size) in [
                ("entity", t.head, n_e),
                ("relation", t.relation, n_r),
                ("entity", t.tail, n_e),
            ] {
                if id >= size {
                    return Err(Error::IdOutOfRange { kind, id, size });
                }
            }
        }
        Ok(Self::from_parts(triples, vocabs))
    }

    fn from_parts(triples: Vec<Triple>, vocabs: Vocabs) -> Self {
        let known = triples.iter().copied().collect();
        let base_relations = vocabs.relations.len();
        Self {
            triples,
            vocabs,
            known,
            base_relations,
            augmented: false,
        }
    }

    /// A store over the same vocabularies holding `triples`.
    pub fn with_triples(&self, triples: Vec<Triple>) -> Self {
        let mut out = Self::from_parts(triples, self.vocabs.clone());
        out.base_relations = self.base_relations;
        out.augmented = self.augmented;
        out
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn vocabs(&self) -> &Vocabs {
        &self.vocabs
    }

    pub fn entities(&self) -> &Vocab {
        &self.vocabs.entities
    }

    pub fn relations(&self) -> &Vocab {
        &self.vocabs.relations
    }

    pub fn entity_count(&self) -> usize {
        self.vocabs.entities.len()
    }

    pub fn relation_count(&self) -> usize {
        self.vocabs.relations.len()
    }

    /// Number of relations before reciprocal augmentation.
    pub fn base_relation_count(&self) -> usize {
        self.base_relations
    }

    pub fn is_augmented(&self) -> bool {
        self.augmented
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.known.contains(triple)
    }

    /// Distinct triples (the membership view).
    pub fn distinct_count(&self) -> usize {
        self.known.len()
    }

    /// Triples per relation id, duplicates included.
    pub fn relation_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.relation_count()];
        for t in &self.triples {
            counts[t.relation] += 1;
        }
        counts
    }

    /// Tail sets per `(head, relation)` query, in first-appearance order of the
    /// query. Tails within a set are sorted and deduplicated.
    pub fn queries(&self) -> Vec<((usize, usize), Vec<usize>)> {
        let mut order = Vec::new();
        let mut tails: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for t in &self.triples {
            tails
                .entry((t.head, t.relation))
                .or_insert_with(|| {
                    order.push((t.head, t.relation));
                    Vec::new()
                })
                .push(t.tail);
        }
        order
            .into_iter()
            .map(|key| {
                let mut ts = tails.remove(&key).unwrap_or_default();
                ts.sort_unstable();
                ts.dedup();
                (key, ts)
            })
            .collect()
    }

    /// Adds `(t, r_inv, h)` for every `(h, r, t)`. Reciprocal relation ids are
    /// `r + m` for `m` base relations.
    pub fn augment_reciprocal(&self) -> Result<TripleStore> {
        if self.augmented {
            return Err(Error::AlreadyAugmented);
        }
        let relations = reciprocal_vocab(&self.vocabs.relations)?;
        let vocabs = Vocabs {
            entities: self.vocabs.entities.clone(),
            relations: Arc::new(relations),
        };
        Ok(self.augment_with(vocabs))
    }

    /// Like [`augment_reciprocal`](Self::augment_reciprocal) but reuses an
    /// already built augmented vocabulary, so several splits share one `Arc`.
    pub fn augment_reciprocal_with(&self, augmented: &Vocabs) -> Result<TripleStore> {
        if self.augmented {
            return Err(Error::AlreadyAugmented);
        }
        let m = self.relation_count();
        if augmented.relations.len() != 2 * m
            || augmented.relations.labels()[..m] != self.vocabs.relations.labels()[..]
            || !(Arc::ptr_eq(&augmented.entities, &self.vocabs.entities)
                || augmented.entities == self.vocabs.entities)
        {
            return Err(Error::VocabMismatch(
                "augmented vocabulary does not extend this store's vocabulary".into(),
            ));
        }
        Ok(self.augment_with(augmented.clone()))
    }

    fn augment_with(&self, vocabs: Vocabs) -> TripleStore {
        let m = self.relation_count();
        let mut triples = Vec::with_capacity(2 * self.triples.len());
        triples.extend_from_slice(&self.triples);
        triples.extend(
            self.triples
                .iter()
                .map(|t| Triple::new(t.tail, t.relation + m, t.head)),
        );
        let mut out = Self::from_parts(triples, vocabs);
        out.base_relations = m;
        out.augmented = true;
        out
    }

    /// Writes the store in the tab-separated label format.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        for t in &self.triples {
            writeln!(
                out,
                "{}\t{}\t{}",
                self.vocabs.entities.labels()[t.head],
                self.vocabs.relations.labels()[t.relation],
                self.vocabs.entities.labels()[t.tail]
            )?;
        }
        Ok(())
    }
}

fn reciprocal_vocab(base: &Vocab) -> Result<Vocab> {
    let mut out = base.clone();
    for label in base.labels() {
        let inverse = format!("{label}{RECIPROCAL_SUFFIX}");
        if base.id(&inverse).is_some() {
            return Err(Error::Format(format!(
                "relation `{inverse}` already exists; cannot add reciprocal of `{label}`"
            )));
        }
        out.insert(inverse);
    }
    Ok(out)
}

/// Checks that all stores share vocabularies.
pub fn ensure_same_vocabs<'a, I>(stores: I) -> Result<()>
where
    I: IntoIterator<Item = &'a TripleStore>,
{
    let mut iter = stores.into_iter();
    if let Some(first) = iter.next() {
        for (i, store) in iter.enumerate() {
            if !first.vocabs().same_as(store.vocabs()) {
                return Err(Error::VocabMismatch(format!(
                    "store {} does not share the vocabulary of store 0",
                    i + 1
                )));
            }
        }
    }
    Ok(())
}
