use rand::Rng;

use super::alias::AliasTable;
use super::shared::{cap_norm, SharedTable};
use crate::math::{axpy, dot, log_sigmoid, sigmoid};

/// One-positive, k-negative logistic update shared by LINE and skip-gram.
///
/// For a positive pair `(src, pos)` it ascends
/// `ln σ(s·t_pos) + Σ_k ln σ(-s·t_k)` with noise nodes `t_k` drawn from
/// `noise`. `targets` may be the same table as `sources` (first-order LINE).
pub(crate) struct NegativeSampler<'a> {
    pub sources: &'a SharedTable,
    pub targets: &'a SharedTable,
    pub noise: &'a AliasTable,
    pub negatives: usize,
    pub max_row_norm: Option<f64>,
}

pub(crate) struct Scratch {
    src: Vec<f64>,
    tgt: Vec<f64>,
    err: Vec<f64>,
}

impl Scratch {
    pub fn new(dim: usize) -> Self {
        Self {
            src: vec![0.0; dim],
            tgt: vec![0.0; dim],
            err: vec![0.0; dim],
        }
    }
}

impl NegativeSampler<'_> {
    pub fn step<R: Rng + ?Sized>(&self, src: usize, pos: usize, lr: f64, rng: &mut R, buf: &mut Scratch) {
        self.sources.load(src, &mut buf.src);
        buf.err.iter_mut().for_each(|e| *e = 0.0);
        self.update_target(pos, 1.0, lr, buf);
        for _ in 0..self.negatives {
            let neg = self.noise.sample(rng);
            if neg == src || neg == pos {
                continue;
            }
            self.update_target(neg, 0.0, lr, buf);
        }
        axpy(1.0, &buf.err, &mut buf.src);
        cap_norm(&mut buf.src, self.max_row_norm);
        self.sources.store(src, &buf.src);
    }

    #[inline]
    fn update_target(&self, target: usize, label: f64, lr: f64, buf: &mut Scratch) {
        self.targets.load(target, &mut buf.tgt);
        let g = (label - sigmoid(dot(&buf.src, &buf.tgt))) * lr;
        axpy(g, &buf.tgt, &mut buf.err);
        axpy(g, &buf.src, &mut buf.tgt);
        cap_norm(&mut buf.tgt, self.max_row_norm);
        self.targets.store(target, &buf.tgt);
    }

    /// `ln σ(s·t_pos) + Σ_k ln σ(-s·t_k)` without updating anything.
    pub fn log_likelihood<R: Rng + ?Sized>(&self, src: usize, pos: usize, rng: &mut R, buf: &mut Scratch) -> f64 {
        self.sources.load(src, &mut buf.src);
        self.targets.load(pos, &mut buf.tgt);
        let mut ll = log_sigmoid(dot(&buf.src, &buf.tgt));
        for _ in 0..self.negatives {
            let neg = self.noise.sample(rng);
            if neg == src || neg == pos {
                continue;
            }
            self.targets.load(neg, &mut buf.tgt);
            ll += log_sigmoid(-dot(&buf.src, &buf.tgt));
        }
        ll
    }
}

/// Noise distribution proportional to `count^0.75`.
pub(crate) fn unigram_noise(counts: impl IntoIterator<Item = f64>) -> crate::Result<AliasTable> {
    let weights: Vec<f64> = counts.into_iter().map(|c| c.powf(0.75)).collect();
    AliasTable::new(&weights)
}
