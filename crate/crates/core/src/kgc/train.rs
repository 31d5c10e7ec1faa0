use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::dropout::{DropoutRates, DropoutState};
use super::forward::update_batchnorm_stats;
use super::loss::{compute_gradients, LabeledBatch};
use super::model::{KgcModelParams, ModelKind};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::eval::{evaluate, FilterIndex};
use crate::kgdata::TripleStore;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    Random,
    Pretrained,
}

impl fmt::Display for InitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitMode::Random => "random",
            InitMode::Pretrained => "pretrained",
        })
    }
}

impl FromStr for InitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(InitMode::Random),
            "pretrained" => Ok(InitMode::Pretrained),
            _ => Err(Error::config(format!("unknown init mode `{s}` (expected random or pretrained)"))),
        }
    }
}

/// Fine-tuning hyperparameters. Defaults follow the usual TuckER setup for
/// FB15k-237, without batch normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub model: ModelKind,
    pub entity_dim: usize,
    pub relation_dim: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Multiplier applied to the learning rate after every epoch.
    pub lr_decay: f64,
    pub label_smoothing: f64,
    pub input_dropout: f64,
    pub hidden_dropout1: f64,
    pub hidden_dropout2: f64,
    pub use_batchnorm: bool,
    pub seed: u64,
    pub init_mode: InitMode,
    /// Evaluate dev MRR every this many epochs; 0 disables it.
    pub dev_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Tucker,
            entity_dim: 200,
            relation_dim: 200,
            epochs: 500,
            batch_size: 128,
            learning_rate: 0.0005,
            lr_decay: 1.0,
            label_smoothing: 0.1,
            input_dropout: 0.3,
            hidden_dropout1: 0.4,
            hidden_dropout2: 0.5,
            use_batchnorm: false,
            seed: 0,
            init_mode: InitMode::Random,
            dev_every: 0,
        }
    }
}

impl TrainConfig {
    pub fn dropout_rates(&self) -> DropoutRates {
        DropoutRates {
            input: self.input_dropout,
            hidden1: self.hidden_dropout1,
            hidden2: self.hidden_dropout2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, rate) in [
            ("input_dropout", self.input_dropout),
            ("hidden_dropout1", self.hidden_dropout1),
            ("hidden_dropout2", self.hidden_dropout2),
            ("label_smoothing", self.label_smoothing),
        ] {
            if !(0.0..1.0).contains(&rate) {
                return Err(Error::config(format!("{name} must lie in [0, 1), got {rate}")));
            }
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size must be positive"));
        }
        if self.entity_dim == 0 || self.relation_dim == 0 {
            return Err(Error::config("dimensions must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("learning_rate must be positive"));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay.is_finite()) {
            return Err(Error::config("lr_decay must be positive"));
        }
        if self.model != ModelKind::Tucker && self.entity_dim != self.relation_dim {
            return Err(Error::config(format!(
                "{} needs entity_dim == relation_dim ({} vs {})",
                self.model, self.entity_dim, self.relation_dim
            )));
        }
        if self.model == ModelKind::ComplEx && self.entity_dim % 2 != 0 {
            return Err(Error::config("complex needs an even dimension"));
        }
        Ok(())
    }
}

/// Held-out split scored during training.
#[derive(Debug, Clone, Copy)]
pub struct DevSet<'a> {
    /// Un-augmented dev triples; head queries go through reciprocal relations.
    pub store: &'a TripleStore,
    pub filter: &'a FilterIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub learning_rate: f64,
    pub dev_mrr: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    pub epochs: Vec<EpochRecord>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct FitOutput {
    pub params: KgcModelParams,
    pub log: TrainingLog,
}

/// Builds the initial parameters: seeded random tables and core, with the
/// entity table replaced by `pretrained` rows in pretrained mode. The random
/// draws happen either way, so paired runs share relation tables and core.
pub fn initial_params(
    train: &TripleStore,
    config: &TrainConfig,
    pretrained: Option<&EmbeddingMatrix>,
) -> Result<KgcModelParams> {
    config.validate()?;
    let mut init_rng = rng::seeded(config.seed);
    let mut params = KgcModelParams::random(
        config.model,
        train.entity_count(),
        train.relation_count(),
        config.entity_dim,
        config.relation_dim,
        config.use_batchnorm,
        &mut init_rng,
    )?;
    match (config.init_mode, pretrained) {
        (InitMode::Pretrained, Some(emb)) => {
            if emb.rows() != train.entity_count() {
                return Err(Error::DimensionMismatch {
                    expected: train.entity_count(),
                    actual: emb.rows(),
                });
            }
            if emb.dim() != config.entity_dim {
                return Err(Error::DimensionMismatch {
                    expected: config.entity_dim,
                    actual: emb.dim(),
                });
            }
            if !emb.is_finite() {
                return Err(Error::config("pretrained embeddings contain non-finite values"));
            }
            params.entities = emb.clone();
        }
        (InitMode::Pretrained, None) => {
            return Err(Error::config("init_mode is pretrained but no embeddings were supplied"));
        }
        (InitMode::Random, Some(_)) => {
            return Err(Error::config("embeddings supplied but init_mode is random"));
        }
        (InitMode::Random, None) => {}
    }
    Ok(params)
}

/// Trains a 1-N scorer on a reciprocal-augmented training store.
pub fn fit(
    train: &TripleStore,
    config: &TrainConfig,
    pretrained: Option<&EmbeddingMatrix>,
    dev: Option<DevSet<'_>>,
) -> Result<FitOutput> {
    if !train.is_augmented() {
        return Err(Error::config("training store must carry reciprocal relations"));
    }
    let mut params = initial_params(train, config, pretrained)?;
    let mut adam = AdamState::for_params(&params);
    let mut order_rng = rng::seeded_stream(config.seed, 1);
    let mut dropout = DropoutState::new(config.dropout_rates(), rng::mix_seed(config.seed, 2));

    let mut log = TrainingLog::default();
    if !config.use_batchnorm {
        log.notes
            .push("batch normalization disabled; the reference TuckER recipe enables it".into());
    }
    log.notes.push(format!("entity init: {}", config.init_mode));

    let queries = train.queries();
    let mut lr = config.learning_rate;
    for epoch in 0..config.epochs {
        let mut order: Vec<usize> = (0..queries.len()).collect();
        order.shuffle(&mut order_rng);
        let mut loss_sum = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(config.batch_size) {
            let mut batch = LabeledBatch::default();
            for &i in chunk {
                let ((h, r), ref tails) = queries[i];
                batch.push(h, r, tails.clone());
            }
            let masks = dropout.sample(params.kind, batch.len(), params.entity_dim());
            let (loss, grads, pass) = compute_gradients(&params, &batch, Some(&masks), config.label_smoothing)?;
            adam_step(&mut params, &grads, &mut adam, lr)?;
            update_batchnorm_stats(&mut params, &pass);
            loss_sum += loss;
            batches += 1;
        }
        let dev_mrr = match dev {
            Some(dev) if config.dev_every > 0 && (epoch + 1) % config.dev_every == 0 => {
                Some(evaluate(&params, dev.store, dev.filter, false)?.mrr)
            }
            _ => None,
        };
        log.epochs.push(EpochRecord {
            epoch: epoch + 1,
            loss: loss_sum / batches.max(1) as f64,
            learning_rate: lr,
            dev_mrr,
        });
        lr *= config.lr_decay;
    }
    Ok(FitOutput { params, log })
}
