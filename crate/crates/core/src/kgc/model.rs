use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::batchnorm::BatchNorm;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Tucker,
    DistMult,
    ComplEx,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Tucker, ModelKind::DistMult, ModelKind::ComplEx];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Tucker => "tucker",
            ModelKind::DistMult => "distmult",
            ModelKind::ComplEx => "complex",
        }
    }

    pub(crate) fn code(self) -> u32 {
        match self {
            ModelKind::Tucker => 0,
            ModelKind::DistMult => 1,
            ModelKind::ComplEx => 2,
        }
    }

    pub(crate) fn from_code(code: u32) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.code() == code)
            .ok_or_else(|| Error::Format(format!("unknown model kind code {code}")))
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown model `{s}` (expected tucker, distmult or complex)")))
    }
}

/// Batch normalization applied to the head vector and to the hidden vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNormPair {
    pub head: BatchNorm,
    pub hidden: BatchNorm,
}

/// Parameters of a 1-N tensor-factorization scorer.
///
/// The core tensor is stored row-major with shape `d_e × d_r × d_e`: entry
/// `(i, j, k)` mixes head coordinate `i`, relation coordinate `j` and tail
/// coordinate `k`. ComplEx rows hold `d/2` real parts followed by `d/2`
/// imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct KgcModelParams {
    pub kind: ModelKind,
    pub entities: EmbeddingMatrix,
    pub relations: EmbeddingMatrix,
    pub core: Vec<f64>,
    pub batchnorm: Option<BatchNormPair>,
}

impl KgcModelParams {
    pub fn new(
        kind: ModelKind,
        entities: EmbeddingMatrix,
        relations: EmbeddingMatrix,
        core: Vec<f64>,
        batchnorm: Option<BatchNormPair>,
    ) -> Result<Self> {
        let params = Self {
            kind,
            entities,
            relations,
            core,
            batchnorm,
        };
        params.validate()?;
        Ok(params)
    }

    /// TuckER-style initialization: entity and relation tables from a
    /// Glorot normal, core uniform in `[-1, 1)`.
    pub fn random<R: Rng + ?Sized>(
        kind: ModelKind,
        entity_count: usize,
        relation_count: usize,
        entity_dim: usize,
        relation_dim: usize,
        use_batchnorm: bool,
        rng: &mut R,
    ) -> Result<Self> {
        let entities = glorot_normal(entity_count, entity_dim, rng);
        let relations = glorot_normal(relation_count, relation_dim, rng);
        let core = match kind {
            ModelKind::Tucker => (0..entity_dim * relation_dim * entity_dim)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect(),
            _ => Vec::new(),
        };
        let batchnorm = use_batchnorm.then(|| BatchNormPair {
            head: BatchNorm::new(entity_dim),
            hidden: BatchNorm::new(entity_dim),
        });
        Self::new(kind, entities, relations, core, batchnorm)
    }

    pub fn validate(&self) -> Result<()> {
        let (d_e, d_r) = (self.entity_dim(), self.relation_dim());
        match self.kind {
            ModelKind::Tucker => {
                if self.core.len() != d_e * d_r * d_e {
                    return Err(Error::LengthMismatch {
                        left: self.core.len(),
                        right: d_e * d_r * d_e,
                    });
                }
            }
            ModelKind::DistMult | ModelKind::ComplEx => {
                if d_e != d_r {
                    return Err(Error::config(format!(
                        "{} needs equal entity and relation dimensions ({d_e} vs {d_r})",
                        self.kind
                    )));
                }
                if self.kind == ModelKind::ComplEx && d_e % 2 != 0 {
                    return Err(Error::config(format!("complex needs an even dimension, got {d_e}")));
                }
                if !self.core.is_empty() {
                    return Err(Error::config(format!("{} has no core tensor", self.kind)));
                }
            }
        }
        if let Some(bn) = &self.batchnorm {
            if bn.head.dim() != d_e || bn.hidden.dim() != d_e {
                return Err(Error::DimensionMismatch {
                    expected: d_e,
                    actual: bn.head.dim(),
                });
            }
        }
        Ok(())
    }

    pub fn entity_count(&self) -> usize {
        self.entities.rows()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.rows()
    }

    pub fn entity_dim(&self) -> usize {
        self.entities.dim()
    }

    pub fn relation_dim(&self) -> usize {
        self.relations.dim()
    }

    #[inline]
    pub fn core_at(&self, i: usize, j: usize, k: usize) -> f64 {
        let (d_e, d_r) = (self.entity_dim(), self.relation_dim());
        self.core[(i * d_r + j) * d_e + k]
    }

    pub fn is_finite(&self) -> bool {
        self.entities.is_finite()
            && self.relations.is_finite()
            && self.core.iter().all(|v| v.is_finite())
            && self.batchnorm.as_ref().is_none_or(|bn| bn.head.is_finite() && bn.hidden.is_finite())
    }

    pub(crate) fn check_ids(&self, head: usize, relation: usize) -> Result<()> {
        if head >= self.entity_count() {
            return Err(Error::IdOutOfRange {
                kind: "entity",
                id: head,
                size: self.entity_count(),
            });
        }
        if relation >= self.relation_count() {
            return Err(Error::IdOutOfRange {
                kind: "relation",
                id: relation,
                size: self.relation_count(),
            });
        }
        Ok(())
    }
}

fn glorot_normal<R: Rng + ?Sized>(rows: usize, dim: usize, rng: &mut R) -> EmbeddingMatrix {
    let std = (2.0 / (rows + dim) as f64).sqrt();
    let normal = Normal::new(0.0, std).expect("positive std");
    let values = (0..rows * dim).map(|_| normal.sample(rng)).collect();
    EmbeddingMatrix::from_values(rows, dim, values).expect("shape matches")
}
