use rand::Rng;
use serde::{Deserialize, Serialize};

use super::model::ModelKind;
use crate::rng::{self, ChaCha8Rng};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DropoutRates {
    /// On the head vector.
    pub input: f64,
    /// On the relation-specific `d_e × d_e` matrix (TuckER only).
    pub hidden1: f64,
    /// On the hidden vector before the product with every tail.
    pub hidden2: f64,
}

impl DropoutRates {
    pub fn is_off(&self) -> bool {
        self.input == 0.0 && self.hidden1 == 0.0 && self.hidden2 == 0.0
    }
}

/// Inverted-dropout multipliers (`0` or `1/(1-p)`). An empty vector means
/// the layer is not dropped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DropoutMasks {
    pub input: Vec<f64>,
    pub hidden1: Vec<f64>,
    pub hidden2: Vec<f64>,
}

/// Source of fresh dropout masks during training.
#[derive(Debug, Clone)]
pub struct DropoutState {
    pub rates: DropoutRates,
    rng: ChaCha8Rng,
}

impl DropoutState {
    pub fn new(rates: DropoutRates, seed: u64) -> Self {
        Self {
            rates,
            rng: rng::seeded(seed),
        }
    }

    pub fn sample(&mut self, kind: ModelKind, rows: usize, entity_dim: usize) -> DropoutMasks {
        let hidden1_len = match kind {
            ModelKind::Tucker => rows * entity_dim * entity_dim,
            _ => 0,
        };
        DropoutMasks {
            input: mask(&mut self.rng, self.rates.input, rows * entity_dim),
            hidden1: mask(&mut self.rng, self.rates.hidden1, hidden1_len),
            hidden2: mask(&mut self.rng, self.rates.hidden2, rows * entity_dim),
        }
    }
}

fn mask(rng: &mut ChaCha8Rng, rate: f64, len: usize) -> Vec<f64> {
    if rate <= 0.0 || len == 0 {
        return Vec::new();
    }
    let keep = 1.0 / (1.0 - rate);
    (0..len)
        .map(|_| if rng.random::<f64>() < rate { 0.0 } else { keep })
        .collect()
}

#[inline]
pub(crate) fn apply(values: &mut [f64], mask: &[f64]) {
    if !mask.is_empty() {
        debug_assert_eq!(values.len(), mask.len());
        values.iter_mut().zip(mask).for_each(|(v, m)| *v *= m);
    }
}
