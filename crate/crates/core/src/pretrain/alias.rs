use rand::Rng;

use crate::error::{Error, Result};

/// Walker/Vose alias table: O(n) build, O(1) draws.
#[derive(Debug, Clone)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl AliasTable {
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("no weights".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidWeights(format!("weight {w} is negative or not finite")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidWeights("all weights are zero".into()));
        }

        let n = weights.len();
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut prob = vec![0.0; n];
        let mut alias: Vec<usize> = (0..n).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| scaled[i] < 1.0);

        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            prob[s] = scaled[s];
            alias[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in large.into_iter().chain(small) {
            prob[i] = 1.0;
            alias[i] = i;
        }
        Ok(Self { prob, alias })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn prob(&self) -> &[f64] {
        &self.prob
    }

    pub fn alias(&self) -> &[usize] {
        &self.alias
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let i = rng.random_range(0..self.prob.len());
        if rng.random::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i]
        }
    }

    /// Probability mass the table assigns to each index.
    pub fn distribution(&self) -> Vec<f64> {
        let n = self.prob.len() as f64;
        let mut share: Vec<f64> = self.prob.iter().map(|p| p / n).collect();
        for (j, &a) in self.alias.iter().enumerate() {
            share[a] += (1.0 - self.prob[j]) / n;
        }
        share
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn uniform_weights() {
        let t = AliasTable::new(&[1.0; 4]).unwrap();
        assert!(t.prob().iter().all(|&p| p == 1.0));
        for s in t.distribution() {
            assert!((s - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn single_weight_always_zero() {
        let t = AliasTable::new(&[5.0]).unwrap();
        let mut r = rng::seeded(1);
        assert!((0..1000).all(|_| t.sample(&mut r) == 0));
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(AliasTable::new(&[]).is_err());
        assert!(AliasTable::new(&[0.0, 0.0]).is_err());
        assert!(AliasTable::new(&[1.0, -1.0]).is_err());
        assert!(AliasTable::new(&[f64::NAN]).is_err());
    }

    #[test]
    fn distribution_matches_weights() {
        let w = [0.5, 0.0, 3.0, 1.5, 7.0];
        let t = AliasTable::new(&w).unwrap();
        let total: f64 = w.iter().sum();
        for (s, wi) in t.distribution().iter().zip(w) {
            assert!((s - wi / total).abs() < 1e-12);
        }
    }

    #[test]
    fn one_three_frequencies_within_three_sigma() {
        let t = AliasTable::new(&[1.0, 3.0]).unwrap();
        let mut r = rng::seeded(7);
        let draws = 100_000;
        let ones = (0..draws).filter(|_| t.sample(&mut r) == 1).count() as f64;
        let sigma = (draws as f64 * 0.75 * 0.25).sqrt();
        assert!((ones - 0.75 * draws as f64).abs() < 3.0 * sigma, "{ones}");
    }
}
