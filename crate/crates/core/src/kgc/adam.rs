use super::forward::Gradients;
use super::model::KgcModelParams;
use crate::error::{Error, Result};

/// One parameter array with its gradient.
pub struct ParamBlock<'a> {
    pub name: &'static str,
    pub values: &'a mut [f64],
    pub grads: &'a [f64],
}

/// Bias-corrected Adam moments, one pair of arrays per parameter block.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step_count: u64,
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(block_sizes: &[usize]) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step_count: 0,
            first_moment: block_sizes.iter().map(|&n| vec![0.0; n]).collect(),
            second_moment: block_sizes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn for_params(params: &KgcModelParams) -> Self {
        let mut sizes = vec![
            params.entities.values().len(),
            params.relations.values().len(),
            params.core.len(),
        ];
        if params.batchnorm.is_some() {
            sizes.extend([params.entity_dim(); 4]);
        }
        Self::new(&sizes)
    }

    pub fn first_moment(&self) -> &[Vec<f64>] {
        &self.first_moment
    }

    pub fn second_moment(&self) -> &[Vec<f64>] {
        &self.second_moment
    }

    /// Applies one update to every block. Nothing changes if any gradient is
    /// non-finite.
    pub fn step(&mut self, blocks: &mut [ParamBlock<'_>], lr: f64) -> Result<()> {
        if blocks.len() != self.first_moment.len() {
            return Err(Error::LengthMismatch {
                left: blocks.len(),
                right: self.first_moment.len(),
            });
        }
        for (block, m) in blocks.iter().zip(&self.first_moment) {
            if block.values.len() != m.len() || block.grads.len() != m.len() {
                return Err(Error::LengthMismatch {
                    left: block.grads.len(),
                    right: m.len(),
                });
            }
            if block.grads.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFiniteGradient(block.name));
            }
        }
        self.step_count += 1;
        let t = self.step_count as i32;
        let correction1 = 1.0 - self.beta1.powi(t);
        let correction2 = 1.0 - self.beta2.powi(t);
        for ((block, m), v) in blocks
            .iter_mut()
            .zip(&mut self.first_moment)
            .zip(&mut self.second_moment)
        {
            for i in 0..m.len() {
                let g = block.grads[i];
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g;
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g * g;
                let m_hat = m[i] / correction1;
                let v_hat = v[i] / correction2;
                block.values[i] -= lr * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }
}

/// Adam update of every block of `params` from `grads`.
pub fn adam_step(params: &mut KgcModelParams, grads: &Gradients, state: &mut AdamState, lr: f64) -> Result<()> {
    let KgcModelParams {
        entities,
        relations,
        core,
        batchnorm,
        ..
    } = params;
    let mut blocks = vec![
        ParamBlock {
            name: "entities",
            values: entities.values_mut(),
            grads: &grads.entities,
        },
        ParamBlock {
            name: "relations",
            values: relations.values_mut(),
            grads: &grads.relations,
        },
        ParamBlock {
            name: "core",
            values: core,
            grads: &grads.core,
        },
    ];
    if let (Some(bn), Some(g)) = (batchnorm.as_mut(), grads.batchnorm.as_ref()) {
        blocks.extend([
            ParamBlock {
                name: "bn_head_gamma",
                values: &mut bn.head.gamma,
                grads: &g.head_gamma,
            },
            ParamBlock {
                name: "bn_head_beta",
                values: &mut bn.head.beta,
                grads: &g.head_beta,
            },
            ParamBlock {
                name: "bn_hidden_gamma",
                values: &mut bn.hidden.gamma,
                grads: &g.hidden_gamma,
            },
            ParamBlock {
                name: "bn_hidden_beta",
                values: &mut bn.hidden.beta,
                grads: &g.hidden_beta,
            },
        ]);
    }
    state.step(&mut blocks, lr)
}
