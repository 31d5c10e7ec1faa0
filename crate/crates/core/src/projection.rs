//! Deterministic 2-D principal-component projection of embedding rows.

use std::io::Write;

use serde::Serialize;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};

/// Method name recorded in output manifests.
pub const PROJECTION_METHOD: &str = "pca";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection2D {
    /// `(x, y)` per input row.
    pub points: Vec<[f64; 2]>,
    /// Variance along each axis (the two largest covariance eigenvalues).
    pub variances: [f64; 2],
    /// Unit principal directions, one per axis.
    pub axes: [Vec<f64>; 2],
}

impl Projection2D {
    /// Tab-separated `label x y` lines.
    pub fn write_tsv<W: Write>(&self, labels: &[String], mut out: W) -> Result<()> {
        if labels.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: self.points.len(),
            });
        }
        for (label, [x, y]) in labels.iter().zip(&self.points) {
            writeln!(out, "{label}\t{x:.9e}\t{y:.9e}")?;
        }
        Ok(())
    }
}

/// Sample covariance (`n - 1` denominator) of the rows, plus the column means.
pub fn row_covariance(emb: &EmbeddingMatrix) -> (Vec<f64>, Vec<f64>) {
    let (n, d) = (emb.rows(), emb.dim());
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, v) in mean.iter_mut().zip(emb.row(i)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut cov = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for i in 0..n {
        for ((c, v), m) in centered.iter_mut().zip(emb.row(i)).zip(&mean) {
            *c = v - m;
        }
        for a in 0..d {
            for b in a..d {
                cov[a * d + b] += centered[a] * centered[b];
            }
        }
    }
    let denom = (n - 1) as f64;
    for a in 0..d {
        for b in a..d {
            let v = cov[a * d + b] / denom;
            cov[a * d + b] = v;
            cov[b * d + a] = v;
        }
    }
    (cov, mean)
}

/// Eigen-decomposition of a symmetric `d × d` matrix by cyclic Jacobi
/// rotations. Returns eigenvalues and column eigenvectors (`v[row * d + col]`).
pub fn symmetric_eigen(matrix: &[f64], d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|p| (0..d).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p * d + q] * a[p * d + q])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale || off == 0.0 {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[p * d + p], a[q * d + q]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let (akp, akq) = (a[k * d + p], a[k * d + q]);
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let (apk, aqk) = (a[p * d + k], a[q * d + k]);
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
                for k in 0..d {
                    let (vkp, vkq) = (v[k * d + p], v[k * d + q]);
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..d).map(|i| a[i * d + i]).collect(), v)
}

/// Projects mean-centered rows onto the two leading principal directions.
/// Each direction is signed so that its first non-negligible loading is
/// positive.
pub fn project_2d(emb: &EmbeddingMatrix) -> Result<Projection2D> {
    let (n, d) = (emb.rows(), emb.dim());
    if n < 2 || d < 2 {
        return Err(Error::config(format!("projection needs at least 2 rows and 2 columns, got {n}×{d}")));
    }
    if !emb.is_finite() {
        return Err(Error::config("embeddings contain non-finite values"));
    }
    let (cov, mean) = row_covariance(emb);
    let trace: f64 = (0..d).map(|i| cov[i * d + i]).sum();
    if trace <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let (values, vectors) = symmetric_eigen(&cov, d);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let axes: [Vec<f64>; 2] = std::array::from_fn(|k| {
        let col = order[k];
        let mut axis: Vec<f64> = (0..d).map(|row| vectors[row * d + col]).collect();
        let tol = 1e-12 * axis.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if axis.iter().find(|x| x.abs() > tol).is_some_and(|&x| x < 0.0) {
            axis.iter_mut().for_each(|x| *x = -*x);
        }
        axis
    });
    let mut centered = vec![0.0; d];
    let points = (0..n)
        .map(|i| {
            for ((c, v), m) in centered.iter_mut().zip(emb.row(i)).zip(&mean) {
                *c = v - m;
            }
            [0, 1].map(|k| centered.iter().zip(&axes[k]).map(|(c, a)| c * a).sum())
        })
        .collect();
    Ok(Projection2D {
        points,
        variances: [values[order[0]].max(0.0), values[order[1]].max(0.0)],
        axes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_is_its_own_decomposition() {
        let (values, vectors) = symmetric_eigen(&[3.0, 0.0, 0.0, 1.0], 2);
        assert_eq!(values, vec![3.0, 1.0]);
        assert_eq!(vectors, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn collinear_rows_have_zero_second_coordinate() {
        let dir = [0.3, -1.2, 0.5, 2.0, 0.1];
        let values: Vec<f64> = (0..8).flat_map(|i| dir.map(|x| x * (i as f64 - 2.5))).collect();
        let p = project_2d(&EmbeddingMatrix::from_values(8, 5, values).unwrap()).unwrap();
        assert!(p.points.iter().all(|q| q[1].abs() < 1e-9));
        let mean_x: f64 = p.points.iter().map(|q| q[0]).sum::<f64>() / 8.0;
        assert!(mean_x.abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        let same = EmbeddingMatrix::from_values(3, 2, vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0]).unwrap();
        assert!(matches!(project_2d(&same), Err(Error::ZeroVariance)));
        assert!(project_2d(&EmbeddingMatrix::zeros(1, 4)).is_err());
        assert!(project_2d(&EmbeddingMatrix::zeros(4, 1)).is_err());
    }
}
