//! Inference-mode scoring of one query against every tail.
//!
//! Each query is computed with fixed-order loops, so a query's scores do not
//! depend on which other queries are scored alongside it.

use super::dropout::DropoutState;
use super::forward::forward_train;
use super::model::{KgcModelParams, ModelKind};
use crate::error::{Error, Result};
use crate::math::dot;

/// TuckER relation matrix `W_r[i,k] = Σ_j r_j G[i,j,k]` (`d_e × d_e`).
pub fn relation_matrix(params: &KgcModelParams, relation: usize) -> Vec<f64> {
    let (d_e, d_r) = (params.entity_dim(), params.relation_dim());
    let r = params.relations.row(relation);
    let mut w = vec![0.0; d_e * d_e];
    for i in 0..d_e {
        let out = &mut w[i * d_e..(i + 1) * d_e];
        for (j, &rj) in r.iter().enumerate() {
            let g = &params.core[(i * d_r + j) * d_e..(i * d_r + j + 1) * d_e];
            for (o, gk) in out.iter_mut().zip(g) {
                *o += rj * gk;
            }
        }
    }
    w
}

/// Hidden vector for `(head, relation)` in inference mode. `rel_matrix` may
/// carry a precomputed [`relation_matrix`] for TuckER.
pub fn hidden_vector(params: &KgcModelParams, head: usize, relation: usize, rel_matrix: Option<&[f64]>) -> Vec<f64> {
    let d_e = params.entity_dim();
    let mut a = params.entities.row(head).to_vec();
    if let Some(bn) = &params.batchnorm {
        let raw = a.clone();
        bn.head.forward_eval_row(&raw, &mut a);
    }
    let r = params.relations.row(relation);
    let mut z = vec![0.0; d_e];
    match params.kind {
        ModelKind::Tucker => {
            let owned;
            let w = match rel_matrix {
                Some(w) => w,
                None => {
                    owned = relation_matrix(params, relation);
                    &owned
                }
            };
            for (i, &ai) in a.iter().enumerate() {
                for (zk, wk) in z.iter_mut().zip(&w[i * d_e..(i + 1) * d_e]) {
                    *zk += ai * wk;
                }
            }
        }
        ModelKind::DistMult => {
            for ((zk, ak), rk) in z.iter_mut().zip(&a).zip(r) {
                *zk = ak * rk;
            }
        }
        ModelKind::ComplEx => {
            let half = d_e / 2;
            for c in 0..half {
                let (ar, ai, rr, ri) = (a[c], a[half + c], r[c], r[half + c]);
                z[c] = ar * rr - ai * ri;
                z[half + c] = ar * ri + ai * rr;
            }
        }
    }
    if let Some(bn) = &params.batchnorm {
        let raw = z.clone();
        bn.hidden.forward_eval_row(&raw, &mut z);
    }
    z
}

#[inline]
fn score_row(kind: ModelKind, hidden: &[f64], tail: &[f64]) -> f64 {
    match kind {
        ModelKind::ComplEx => {
            let half = hidden.len() / 2;
            dot(&hidden[..half], &tail[..half]) + dot(&hidden[half..], &tail[half..])
        }
        _ => dot(hidden, tail),
    }
}

/// Scores of `hidden` against every entity, written into `out`.
pub fn scores_from_hidden(params: &KgcModelParams, hidden: &[f64], out: &mut [f64]) {
    for (t, o) in out.iter_mut().enumerate() {
        *o = score_row(params.kind, hidden, params.entities.row(t));
    }
}

/// Scores `(head, relation, t)` for every entity `t`.
///
/// Without `dropout` this is the deterministic inference path. With it, the
/// query runs through the training forward pass (a batch of one) with freshly
/// sampled masks.
pub fn score_all_tails(
    params: &KgcModelParams,
    head: usize,
    relation: usize,
    dropout: Option<&mut DropoutState>,
) -> Result<Vec<f64>> {
    params.check_ids(head, relation)?;
    match dropout {
        None => {
            let z = hidden_vector(params, head, relation, None);
            let mut out = vec![0.0; params.entity_count()];
            scores_from_hidden(params, &z, &mut out);
            Ok(out)
        }
        Some(state) => {
            let masks = state.sample(params.kind, 1, params.entity_dim());
            Ok(forward_train(params, &[head], &[relation], Some(&masks))?.scores)
        }
    }
}

/// Score of a single triple.
pub fn score_triple(params: &KgcModelParams, head: usize, relation: usize, tail: usize) -> Result<f64> {
    params.check_ids(head, relation)?;
    if tail >= params.entity_count() {
        return Err(Error::IdOutOfRange {
            kind: "entity",
            id: tail,
            size: params.entity_count(),
        });
    }
    let z = hidden_vector(params, head, relation, None);
    Ok(score_row(params.kind, &z, params.entities.row(tail)))
}
