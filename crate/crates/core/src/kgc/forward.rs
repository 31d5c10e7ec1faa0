//! Batched training-mode forward pass and its exact adjoint.
//!
//! For a batch of `(head, relation)` queries the scorer computes
//!
//! ```text
//! a   = dropout_in(bn_head(E[h]))
//! z   = f(a, R[r])                 tucker: z_k = Σ_ij G[i,j,k] a_i r_j
//! x   = dropout_2(bn_hidden(z))    distmult: z = a ⊙ r; complex: z = a·r (complex product)
//! s_t = x · E[t]                   for every entity t
//! ```
//!
//! TuckER also drops entries of the relation matrix `W_r = G ×₂ r`.

use super::batchnorm::BatchNormCache;
use super::dropout::{apply, DropoutMasks};
use super::model::{KgcModelParams, ModelKind};
use crate::error::{Error, Result};
use crate::math::{gemm, gemm_at, gemm_bt};

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    pub heads: Vec<usize>,
    pub relations: Vec<usize>,
    head_bn: Option<BatchNormCache>,
    /// Head vectors after normalization and dropout (`B × d_e`).
    head_in: Vec<f64>,
    /// Gathered relation rows (`B × d_r`).
    rel_in: Vec<f64>,
    /// TuckER relation matrices after dropout (`B × d_e × d_e`).
    rel_mats: Vec<f64>,
    hidden_bn: Option<BatchNormCache>,
    /// Final hidden vectors (`B × d_e`).
    hidden: Vec<f64>,
    /// Scores against every entity (`B × n_e`).
    pub scores: Vec<f64>,
}

impl ForwardPass {
    pub fn batch_size(&self) -> usize {
        self.heads.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchNormGrads {
    pub head_gamma: Vec<f64>,
    pub head_beta: Vec<f64>,
    pub hidden_gamma: Vec<f64>,
    pub hidden_beta: Vec<f64>,
}

/// Gradients congruent with every parameter block.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub entities: Vec<f64>,
    pub relations: Vec<f64>,
    pub core: Vec<f64>,
    pub batchnorm: Option<BatchNormGrads>,
}

/// Core rearranged as `d_r × (d_e·d_e)` so `W = R·G₂` is one product.
fn core_by_relation(params: &KgcModelParams) -> Vec<f64> {
    let (d_e, d_r) = (params.entity_dim(), params.relation_dim());
    let mut out = vec![0.0; params.core.len()];
    for i in 0..d_e {
        for j in 0..d_r {
            let src = (i * d_r + j) * d_e;
            let dst = j * d_e * d_e + i * d_e;
            out[dst..dst + d_e].copy_from_slice(&params.core[src..src + d_e]);
        }
    }
    out
}

pub fn forward_train(
    params: &KgcModelParams,
    heads: &[usize],
    relations: &[usize],
    masks: Option<&DropoutMasks>,
) -> Result<ForwardPass> {
    if heads.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if heads.len() != relations.len() {
        return Err(Error::LengthMismatch {
            left: heads.len(),
            right: relations.len(),
        });
    }
    for (&h, &r) in heads.iter().zip(relations) {
        params.check_ids(h, r)?;
    }
    let empty = DropoutMasks::default();
    let masks = masks.unwrap_or(&empty);
    let b = heads.len();
    let (n_e, d_e, d_r) = (params.entity_count(), params.entity_dim(), params.relation_dim());

    let mut head_in = Vec::with_capacity(b * d_e);
    for &h in heads {
        head_in.extend_from_slice(params.entities.row(h));
    }
    let head_bn = match &params.batchnorm {
        Some(bn) => {
            let (out, cache) = bn.head.forward_train(&head_in, b);
            head_in = out;
            Some(cache)
        }
        None => None,
    };
    apply(&mut head_in, &masks.input);

    let mut rel_in = Vec::with_capacity(b * d_r);
    for &r in relations {
        rel_in.extend_from_slice(params.relations.row(r));
    }

    let mut rel_mats = Vec::new();
    let mut hidden = vec![0.0; b * d_e];
    match params.kind {
        ModelKind::Tucker => {
            rel_mats = vec![0.0; b * d_e * d_e];
            gemm(b, d_r, d_e * d_e, 1.0, &rel_in, &core_by_relation(params), 0.0, &mut rel_mats);
            apply(&mut rel_mats, &masks.hidden1);
            for q in 0..b {
                let a = &head_in[q * d_e..(q + 1) * d_e];
                let w = &rel_mats[q * d_e * d_e..(q + 1) * d_e * d_e];
                gemm(1, d_e, d_e, 1.0, a, w, 0.0, &mut hidden[q * d_e..(q + 1) * d_e]);
            }
        }
        ModelKind::DistMult => {
            for ((z, a), r) in hidden.iter_mut().zip(&head_in).zip(&rel_in) {
                *z = a * r;
            }
        }
        ModelKind::ComplEx => {
            let half = d_e / 2;
            for q in 0..b {
                let a = &head_in[q * d_e..(q + 1) * d_e];
                let r = &rel_in[q * d_e..(q + 1) * d_e];
                let z = &mut hidden[q * d_e..(q + 1) * d_e];
                for c in 0..half {
                    let (ar, ai, rr, ri) = (a[c], a[half + c], r[c], r[half + c]);
                    z[c] = ar * rr - ai * ri;
                    z[half + c] = ar * ri + ai * rr;
                }
            }
        }
    }

    let hidden_bn = match &params.batchnorm {
        Some(bn) => {
            let (out, cache) = bn.hidden.forward_train(&hidden, b);
            hidden = out;
            Some(cache)
        }
        None => None,
    };
    apply(&mut hidden, &masks.hidden2);

    let mut scores = vec![0.0; b * n_e];
    gemm_bt(b, d_e, n_e, 1.0, &hidden, params.entities.values(), 0.0, &mut scores);

    Ok(ForwardPass {
        heads: heads.to_vec(),
        relations: relations.to_vec(),
        head_bn,
        head_in,
        rel_in,
        rel_mats,
        hidden_bn,
        hidden,
        scores,
    })
}

/// Back-propagates `d_scores` (`B × n_e`) through `pass`.
pub fn backward(
    params: &KgcModelParams,
    pass: &ForwardPass,
    d_scores: &[f64],
    masks: Option<&DropoutMasks>,
) -> Result<Gradients> {
    let empty = DropoutMasks::default();
    let masks = masks.unwrap_or(&empty);
    let b = pass.batch_size();
    let (n_e, d_e, d_r) = (params.entity_count(), params.entity_dim(), params.relation_dim());
    if d_scores.len() != b * n_e {
        return Err(Error::LengthMismatch {
            left: d_scores.len(),
            right: b * n_e,
        });
    }

    // s = x·Eᵀ: every entity row is a tail candidate.
    let mut d_entities = vec![0.0; n_e * d_e];
    gemm_at(n_e, b, d_e, 1.0, d_scores, &pass.hidden, 0.0, &mut d_entities);
    let mut d_hidden = vec![0.0; b * d_e];
    gemm(b, n_e, d_e, 1.0, d_scores, params.entities.values(), 0.0, &mut d_hidden);
    apply(&mut d_hidden, &masks.hidden2);

    let mut bn_grads = None;
    if let (Some(bn), Some(cache)) = (&params.batchnorm, &pass.hidden_bn) {
        let (dx, dg, db) = bn.hidden.backward(&d_hidden, cache, b);
        d_hidden = dx;
        bn_grads = Some(BatchNormGrads {
            hidden_gamma: dg,
            hidden_beta: db,
            ..Default::default()
        });
    }

    let mut d_head = vec![0.0; b * d_e];
    let mut d_rel = vec![0.0; b * d_r];
    let mut d_core = Vec::new();
    match params.kind {
        ModelKind::Tucker => {
            let dd = d_e * d_e;
            let mut d_mats = vec![0.0; b * dd];
            for q in 0..b {
                let a = &pass.head_in[q * d_e..(q + 1) * d_e];
                let w = &pass.rel_mats[q * dd..(q + 1) * dd];
                let dz = &d_hidden[q * d_e..(q + 1) * d_e];
                // z = a·W  ⇒  dW = a ⊗ dz,  da = W·dz
                gemm(d_e, 1, d_e, 1.0, a, dz, 0.0, &mut d_mats[q * dd..(q + 1) * dd]);
                gemm(d_e, d_e, 1, 1.0, w, dz, 0.0, &mut d_head[q * d_e..(q + 1) * d_e]);
            }
            apply(&mut d_mats, &masks.hidden1);
            // W = R·G₂  ⇒  dG₂ = Rᵀ·dW,  dR = dW·G₂ᵀ
            let core2 = core_by_relation(params);
            let mut d_core2 = vec![0.0; d_r * dd];
            gemm_at(d_r, b, dd, 1.0, &pass.rel_in, &d_mats, 0.0, &mut d_core2);
            gemm_bt(b, dd, d_r, 1.0, &d_mats, &core2, 0.0, &mut d_rel);
            d_core = vec![0.0; params.core.len()];
            for i in 0..d_e {
                for j in 0..d_r {
                    let src = j * dd + i * d_e;
                    let dst = (i * d_r + j) * d_e;
                    d_core[dst..dst + d_e].copy_from_slice(&d_core2[src..src + d_e]);
                }
            }
        }
        ModelKind::DistMult => {
            for i in 0..b * d_e {
                d_head[i] = d_hidden[i] * pass.rel_in[i];
                d_rel[i] = d_hidden[i] * pass.head_in[i];
            }
        }
        ModelKind::ComplEx => {
            let half = d_e / 2;
            for q in 0..b {
                let o = q * d_e;
                for c in 0..half {
                    let (re, im) = (o + c, o + half + c);
                    let (dzr, dzi) = (d_hidden[re], d_hidden[im]);
                    let (ar, ai) = (pass.head_in[re], pass.head_in[im]);
                    let (rr, ri) = (pass.rel_in[re], pass.rel_in[im]);
                    d_head[re] = dzr * rr + dzi * ri;
                    d_head[im] = -dzr * ri + dzi * rr;
                    d_rel[re] = dzr * ar + dzi * ai;
                    d_rel[im] = -dzr * ai + dzi * ar;
                }
            }
        }
    }

    apply(&mut d_head, &masks.input);
    if let (Some(bn), Some(cache)) = (&params.batchnorm, &pass.head_bn) {
        let (dx, dg, db) = bn.head.backward(&d_head, cache, b);
        d_head = dx;
        let grads = bn_grads.get_or_insert_with(Default::default);
        grads.head_gamma = dg;
        grads.head_beta = db;
    }

    for (q, &h) in pass.heads.iter().enumerate() {
        let row = &mut d_entities[h * d_e..(h + 1) * d_e];
        for (g, d) in row.iter_mut().zip(&d_head[q * d_e..(q + 1) * d_e]) {
            *g += d;
        }
    }
    let mut d_relations = vec![0.0; params.relation_count() * d_r];
    for (q, &r) in pass.relations.iter().enumerate() {
        let row = &mut d_relations[r * d_r..(r + 1) * d_r];
        for (g, d) in row.iter_mut().zip(&d_rel[q * d_r..(q + 1) * d_r]) {
            *g += d;
        }
    }

    Ok(Gradients {
        entities: d_entities,
        relations: d_relations,
        core: d_core,
        batchnorm: bn_grads,
    })
}

/// Writes the batch statistics of `pass` into the running averages.
pub fn update_batchnorm_stats(params: &mut KgcModelParams, pass: &ForwardPass) {
    let b = pass.batch_size();
    if let Some(bn) = params.batchnorm.as_mut() {
        if let Some(cache) = &pass.head_bn {
            bn.head.update_running(cache, b);
        }
        if let Some(cache) = &pass.hidden_bn {
            bn.hidden.update_running(cache, b);
        }
    }
}
