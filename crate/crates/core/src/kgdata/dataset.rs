use std::fs::File;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};

use super::store::{parse_triples, scan_labels, TripleStore, Vocabs};
use super::vocab::Vocab;
use crate::error::{Error, Result};

pub const TRAIN_FILE: &str = "train.txt";
pub const VALID_FILE: &str = "valid.txt";
pub const TEST_FILE: &str = "test.txt";

/// Train, validation and test splits over a vocabulary built from all three.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub train: TripleStore,
    pub valid: TripleStore,
    pub test: TripleStore,
}

impl Dataset {
    pub fn split_paths(dir: &Path) -> [PathBuf; 3] {
        [dir.join(TRAIN_FILE), dir.join(VALID_FILE), dir.join(TEST_FILE)]
    }

    /// Loads `train.txt`, `valid.txt` and `test.txt` from `dir`.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let mut texts = Vec::with_capacity(3);
        for path in Self::split_paths(dir.as_ref()) {
            let mut text = String::new();
            File::open(&path)
                .and_then(|f| BufReader::new(f).read_to_string(&mut text))
                .map_err(|e| Error::at_path(&path, e))?;
            texts.push(text);
        }
        Self::from_texts(&texts[0], &texts[1], &texts[2])
    }

    /// Entity and relation ids follow first appearance in train, then
    /// validation, then test.
    pub fn from_texts(train: &str, valid: &str, test: &str) -> Result<Self> {
        let mut entities = Vocab::new();
        let mut relations = Vocab::new();
        for text in [train, valid, test] {
            scan_labels(text.as_bytes(), &mut entities, &mut relations)?;
        }
        let vocabs = Vocabs::new(entities, relations);
        Ok(Self {
            train: parse_triples(train.as_bytes(), Some(&vocabs))?,
            valid: parse_triples(valid.as_bytes(), Some(&vocabs))?,
            test: parse_triples(test.as_bytes(), Some(&vocabs))?,
        })
    }

    pub fn vocabs(&self) -> &Vocabs {
        self.train.vocabs()
    }

    pub fn entity_count(&self) -> usize {
        self.train.entity_count()
    }

    pub fn relation_count(&self) -> usize {
        self.train.relation_count()
    }

    /// All three splits with reciprocal relations, sharing one vocabulary.
    pub fn augmented(&self) -> Result<Dataset> {
        let train = self.train.augment_reciprocal()?;
        let valid = self.valid.augment_reciprocal_with(train.vocabs())?;
        let test = self.test.augment_reciprocal_with(train.vocabs())?;
        Ok(Dataset { train, valid, test })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocab_covers_all_splits() {
        let ds = Dataset::from_texts("a\tr\tb\n", "b\tr\tc\n", "c\ts\td\n").unwrap();
        assert_eq!(ds.entity_count(), 4);
        assert_eq!(ds.relation_count(), 2);
        assert_eq!(ds.train.len(), 1);
        assert_eq!(ds.test.triples()[0].tail, 3);
        let aug = ds.augmented().unwrap();
        assert_eq!(aug.test.relation_count(), 4);
    }

    #[test]
    fn missing_file_names_path() {
        let err = Dataset::load("/definitely/not/here").unwrap_err();
        assert!(err.to_string().contains("train.txt"), "{err}");
    }
}
