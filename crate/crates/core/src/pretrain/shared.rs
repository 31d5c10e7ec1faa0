use std::sync::atomic::{AtomicU64, Ordering};

use crate::embedding::EmbeddingMatrix;

/// Embedding table that several workers may update without locks.
///
/// Each value is an `AtomicU64` holding `f64` bits, read and written with
/// relaxed ordering: concurrent read-modify-write sequences on the same row
/// may lose updates (the hogwild contract) but never tear a value. With one
/// worker the arithmetic is identical to a plain `Vec<f64>`.
pub(crate) struct SharedTable {
    dim: usize,
    cells: Vec<AtomicU64>,
}

impl SharedTable {
    pub fn from_matrix(m: &EmbeddingMatrix) -> Self {
        Self {
            dim: m.dim(),
            cells: m.values().iter().map(|v| AtomicU64::new(v.to_bits())).collect(),
        }
    }

    pub fn into_matrix(self, rows: usize) -> EmbeddingMatrix {
        let values = self
            .cells
            .into_iter()
            .map(|c| f64::from_bits(c.into_inner()))
            .collect();
        EmbeddingMatrix::from_values(rows, self.dim, values).expect("shape preserved")
    }

    #[inline]
    pub fn load(&self, row: usize, out: &mut [f64]) {
        let base = row * self.dim;
        for (o, c) in out.iter_mut().zip(&self.cells[base..base + self.dim]) {
            *o = f64::from_bits(c.load(Ordering::Relaxed));
        }
    }

    #[inline]
    pub fn store(&self, row: usize, values: &[f64]) {
        let base = row * self.dim;
        for (v, c) in values.iter().zip(&self.cells[base..base + self.dim]) {
            c.store(v.to_bits(), Ordering::Relaxed);
        }
    }
}

/// Scales `row` down to `cap` when its norm exceeds it.
#[inline]
pub(crate) fn cap_norm(row: &mut [f64], cap: Option<f64>) {
    if let Some(cap) = cap {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > cap {
            let s = cap / norm;
            row.iter_mut().for_each(|v| *v *= s);
        }
    }
}
