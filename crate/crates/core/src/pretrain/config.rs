use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// LINE, first-order proximity.
    Line1,
    /// LINE, second-order proximity.
    Line2,
    /// First- and second-order halves concatenated.
    Line3,
    DeepWalk,
    Node2Vec,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Line1,
        Method::Line2,
        Method::Line3,
        Method::DeepWalk,
        Method::Node2Vec,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Line1 => "line1",
            Method::Line2 => "line2",
            Method::Line3 => "line3",
            Method::DeepWalk => "deepwalk",
            Method::Node2Vec => "node2vec",
        }
    }

    pub fn is_line(self) -> bool {
        matches!(self, Method::Line1 | Method::Line2 | Method::Line3)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unsupported method `{s}` (expected one of line1, line2, line3, deepwalk, node2vec)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PretrainConfig {
    pub method: Method,
    pub dim: usize,
    /// Edge samples for LINE (per order; `line3` runs both orders).
    pub total_samples: u64,
    /// Passes over the walk corpus for DeepWalk/node2vec.
    pub epochs: usize,
    pub negatives: usize,
    pub learning_rate: f64,
    pub walk_length: usize,
    pub walks_per_node: usize,
    pub window: usize,
    /// node2vec return parameter.
    pub p: f64,
    /// node2vec in-out parameter.
    pub q: f64,
    pub seed: u64,
    /// Worker threads; above 1 enables lock-free (hogwild) updates.
    pub threads: usize,
    /// Renormalize rows whose norm exceeds this value. Off when `None`.
    pub max_row_norm: Option<f64>,
}

impl Default for PretrainConfig {
    fn default() -> Self {
        Self {
            method: Method::Line3,
            dim: 200,
            total_samples: 10_000_000,
            epochs: 5,
            negatives: 5,
            learning_rate: 0.025,
            walk_length: 80,
            walks_per_node: 10,
            window: 10,
            p: 1.0,
            q: 1.0,
            seed: 0,
            threads: 1,
            max_row_norm: None,
        }
    }
}

impl PretrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::config("pretrain dim must be at least 2"));
        }
        if self.method == Method::Line3 && self.dim % 2 != 0 {
            return Err(Error::config(format!(
                "line3 concatenates two halves, so dim must be even (got {})",
                self.dim
            )));
        }
        if !(self.p > 0.0 && self.q > 0.0) {
            return Err(Error::config("node2vec p and q must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("learning rate must be positive"));
        }
        if !self.method.is_line() {
            if self.walk_length < 2 {
                return Err(Error::config("walk_length must be at least 2"));
            }
            if self.window == 0 {
                return Err(Error::config("window must be at least 1"));
            }
        }
        if let Some(cap) = self.max_row_norm {
            if !(cap > 0.0) {
                return Err(Error::config("max_row_norm must be positive"));
            }
        }
        Ok(())
    }

    /// Learning rate after `done` of `total` updates: linear from the
    /// initial rate down to one hundredth of it.
    pub fn rate_at(&self, done: u64, total: u64) -> f64 {
        let frac = if total == 0 {
            0.0
        } else {
            (done as f64 / total as f64).min(1.0)
        };
        self.learning_rate * (1.0 - 0.99 * frac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_roundtrip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        let err = "sdne".parse::<Method>().unwrap_err().to_string();
        assert!(err.contains("line1, line2, line3, deepwalk, node2vec"));
    }

    #[test]
    fn validation() {
        let mut c = PretrainConfig {
            dim: 7,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c.method = Method::Line1;
        assert!(c.validate().is_ok());
        c.method = Method::Node2Vec;
        c.q = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn linear_decay_endpoints() {
        let c = PretrainConfig::default();
        assert_eq!(c.rate_at(0, 100), 0.025);
        assert!((c.rate_at(100, 100) - 0.00025).abs() < 1e-15);
    }
}
