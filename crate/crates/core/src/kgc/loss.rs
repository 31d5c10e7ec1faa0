use super::dropout::DropoutMasks;
use super::forward::{backward, forward_train, ForwardPass, Gradients};
use super::model::KgcModelParams;
use crate::error::{Error, Result};
use crate::math::sigmoid;

/// Probabilities are clamped to `[EPS, 1 - EPS]` before taking logs.
pub const BCE_EPS: f64 = 1e-12;

pub fn predict_probabilities(scores: &[f64]) -> Vec<f64> {
    scores.iter().map(|&s| sigmoid(s)).collect()
}

/// Mean binary cross-entropy over one score vector.
pub fn bce_loss(p: &[f64], y: &[f64]) -> Result<f64> {
    if p.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: y.len(),
        });
    }
    if p.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = p
        .iter()
        .zip(y)
        .map(|(&p, &y)| {
            let p = p.clamp(BCE_EPS, 1.0 - BCE_EPS);
            y * p.ln() + (1.0 - y) * (1.0 - p).ln()
        })
        .sum();
    Ok(-sum / p.len() as f64)
}

/// `(head, relation)` queries with their known tails.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledBatch {
    pub heads: Vec<usize>,
    pub relations: Vec<usize>,
    pub tails: Vec<Vec<usize>>,
}

impl LabeledBatch {
    pub fn len(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }

    pub fn push(&mut self, head: usize, relation: usize, tails: Vec<usize>) {
        self.heads.push(head);
        self.relations.push(relation);
        self.tails.push(tails);
    }

    /// Multi-hot rows smoothed as `(1 - ls)·y + ls / n_e`.
    pub fn targets(&self, entity_count: usize, label_smoothing: f64) -> Vec<f64> {
        let base = label_smoothing / entity_count as f64;
        let mut y = vec![base; self.len() * entity_count];
        for (q, tails) in self.tails.iter().enumerate() {
            for &t in tails {
                y[q * entity_count + t] = (1.0 - label_smoothing) + base;
            }
        }
        y
    }
}

/// Mean over the batch of the per-query loss.
pub fn batch_loss(
    params: &KgcModelParams,
    batch: &LabeledBatch,
    masks: Option<&DropoutMasks>,
    label_smoothing: f64,
) -> Result<f64> {
    let pass = forward_train(params, &batch.heads, &batch.relations, masks)?;
    loss_of(&pass, batch, params.entity_count(), label_smoothing)
}

fn loss_of(pass: &ForwardPass, batch: &LabeledBatch, n_e: usize, label_smoothing: f64) -> Result<f64> {
    let y = batch.targets(n_e, label_smoothing);
    let p = predict_probabilities(&pass.scores);
    let mut total = 0.0;
    for q in 0..batch.len() {
        total += bce_loss(&p[q * n_e..(q + 1) * n_e], &y[q * n_e..(q + 1) * n_e])?;
    }
    Ok(total / batch.len() as f64)
}

/// Loss and exact gradients for one batch. The score gradient is
/// `(p - y) / (n_e · B)`.
pub fn compute_gradients(
    params: &KgcModelParams,
    batch: &LabeledBatch,
    masks: Option<&DropoutMasks>,
    label_smoothing: f64,
) -> Result<(f64, Gradients, ForwardPass)> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let n_e = params.entity_count();
    for tails in &batch.tails {
        if let Some(&t) = tails.iter().find(|&&t| t >= n_e) {
            return Err(Error::IdOutOfRange {
                kind: "entity",
                id: t,
                size: n_e,
            });
        }
    }
    let pass = forward_train(params, &batch.heads, &batch.relations, masks)?;
    let loss = loss_of(&pass, batch, n_e, label_smoothing)?;
    let y = batch.targets(n_e, label_smoothing);
    let scale = 1.0 / (n_e * batch.len()) as f64;
    let d_scores: Vec<f64> = pass
        .scores
        .iter()
        .zip(&y)
        .map(|(&s, &y)| (sigmoid(s) - y) * scale)
        .collect();
    let grads = backward(params, &pass, &d_scores, masks)?;
    Ok((loss, grads, pass))
}
