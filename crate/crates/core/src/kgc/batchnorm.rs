/// Per-feature batch normalization with learnable scale and shift.
///
/// Training mode normalizes with the batch mean and biased variance;
/// inference mode uses running averages updated with `momentum`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNorm {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub running_mean: Vec<f64>,
    pub running_var: Vec<f64>,
    pub momentum: f64,
    pub eps: f64,
}

/// Values kept from a training-mode forward pass for the backward pass.
#[derive(Debug, Clone)]
pub struct BatchNormCache {
    pub normalized: Vec<f64>,
    pub inv_std: Vec<f64>,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

impl BatchNorm {
    pub fn new(dim: usize) -> Self {
        Self {
            gamma: vec![1.0; dim],
            beta: vec![0.0; dim],
            running_mean: vec![0.0; dim],
            running_var: vec![1.0; dim],
            momentum: 0.1,
            eps: 1e-5,
        }
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_finite(&self) -> bool {
        [&self.gamma, &self.beta, &self.running_mean, &self.running_var]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()))
    }

    /// Normalizes a `rows × dim` block with batch statistics.
    pub fn forward_train(&self, x: &[f64], rows: usize) -> (Vec<f64>, BatchNormCache) {
        let d = self.dim();
        let mut mean = vec![0.0; d];
        for r in 0..rows {
            for (m, v) in mean.iter_mut().zip(&x[r * d..(r + 1) * d]) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= rows as f64);
        let mut var = vec![0.0; d];
        for r in 0..rows {
            for ((s, v), m) in var.iter_mut().zip(&x[r * d..(r + 1) * d]).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        var.iter_mut().for_each(|s| *s /= rows as f64);
        let inv_std: Vec<f64> = var.iter().map(|v| 1.0 / (v + self.eps).sqrt()).collect();

        let mut normalized = vec![0.0; x.len()];
        let mut out = vec![0.0; x.len()];
        for r in 0..rows {
            for c in 0..d {
                let i = r * d + c;
                normalized[i] = (x[i] - mean[c]) * inv_std[c];
                out[i] = self.gamma[c] * normalized[i] + self.beta[c];
            }
        }
        (
            out,
            BatchNormCache {
                normalized,
                inv_std,
                mean,
                var,
            },
        )
    }

    /// Normalizes one row with the running statistics.
    pub fn forward_eval_row(&self, x: &[f64], out: &mut [f64]) {
        for c in 0..self.dim() {
            out[c] = self.gamma[c] * (x[c] - self.running_mean[c]) / (self.running_var[c] + self.eps).sqrt()
                + self.beta[c];
        }
    }

    /// Returns `(dx, dgamma, dbeta)` for upstream gradient `dy`.
    pub fn backward(&self, dy: &[f64], cache: &BatchNormCache, rows: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let n = rows as f64;
        let mut dgamma = vec![0.0; d];
        let mut dbeta = vec![0.0; d];
        let mut sum_dxhat = vec![0.0; d];
        let mut sum_dxhat_xhat = vec![0.0; d];
        for r in 0..rows {
            for c in 0..d {
                let i = r * d + c;
                dgamma[c] += dy[i] * cache.normalized[i];
                dbeta[c] += dy[i];
                let dxhat = dy[i] * self.gamma[c];
                sum_dxhat[c] += dxhat;
                sum_dxhat_xhat[c] += dxhat * cache.normalized[i];
            }
        }
        let mut dx = vec![0.0; dy.len()];
        for r in 0..rows {
            for c in 0..d {
                let i = r * d + c;
                let dxhat = dy[i] * self.gamma[c];
                dx[i] = cache.inv_std[c] / n
                    * (n * dxhat - sum_dxhat[c] - cache.normalized[i] * sum_dxhat_xhat[c]);
            }
        }
        (dx, dgamma, dbeta)
    }

    /// Folds batch statistics into the running averages (unbiased variance).
    pub fn update_running(&mut self, cache: &BatchNormCache, rows: usize) {
        let unbias = if rows > 1 {
            rows as f64 / (rows - 1) as f64
        } else {
            1.0
        };
        for c in 0..self.dim() {
            self.running_mean[c] = (1.0 - self.momentum) * self.running_mean[c] + self.momentum * cache.mean[c];
            self.running_var[c] =
                (1.0 - self.momentum) * self.running_var[c] + self.momentum * cache.var[c] * unbias;
        }
    }
}
