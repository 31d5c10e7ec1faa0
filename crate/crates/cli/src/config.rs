//! Flat `key = value` run configuration with dotted namespaces.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use netpeace_core::kgc::TrainConfig;
use netpeace_core::{PretrainConfig, StatsOptions};

use crate::error::CliError;

/// Every recognized key with its default, as text.
fn defaults() -> BTreeMap<String, String> {
    let p = PretrainConfig::default();
    let t = TrainConfig::default();
    let s = StatsOptions::default();
    let entries: Vec<(&str, String)> = vec![
        ("seed", "0".into()),
        ("threads", "1".into()),
        ("pretrain.method", p.method.to_string()),
        ("pretrain.dim", p.dim.to_string()),
        ("pretrain.total_samples", p.total_samples.to_string()),
        ("pretrain.epochs", p.epochs.to_string()),
        ("pretrain.negatives", p.negatives.to_string()),
        ("pretrain.learning_rate", p.learning_rate.to_string()),
        ("pretrain.walk_length", p.walk_length.to_string()),
        ("pretrain.walks_per_node", p.walks_per_node.to_string()),
        ("pretrain.window", p.window.to_string()),
        ("pretrain.p", p.p.to_string()),
        ("pretrain.q", p.q.to_string()),
        ("pretrain.max_row_norm", "none".into()),
        ("pretrain.format", "text".into()),
        ("train.model", t.model.to_string()),
        ("train.entity_dim", t.entity_dim.to_string()),
        ("train.relation_dim", t.relation_dim.to_string()),
        ("train.epochs", t.epochs.to_string()),
        ("train.batch_size", t.batch_size.to_string()),
        ("train.learning_rate", t.learning_rate.to_string()),
        ("train.lr_decay", t.lr_decay.to_string()),
        ("train.label_smoothing", t.label_smoothing.to_string()),
        ("train.input_dropout", t.input_dropout.to_string()),
        ("train.hidden_dropout1", t.hidden_dropout1.to_string()),
        ("train.hidden_dropout2", t.hidden_dropout2.to_string()),
        ("train.use_batchnorm", t.use_batchnorm.to_string()),
        ("train.init_mode", t.init_mode.to_string()),
        ("train.pretrained", String::new()),
        ("train.dev_every", t.dev_every.to_string()),
        ("eval.group_by_relation", "true".into()),
        ("stats.path_sample_size", s.path_sample_size.to_string()),
        ("stats.exclude_isolated", s.exclude_isolated.to_string()),
        ("stats.splits", "train".into()),
        ("lowres.cap", "100".into()),
    ];
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Resolved configuration: defaults, then the config file, then flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn resolve(file: Option<&Path>, overrides: &[(String, String)]) -> Result<Self, CliError> {
        let mut config = Self { values: defaults() };
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            for (n, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    CliError::Usage(format!("{}:{}: expected `key = value`", path.display(), n + 1))
                })?;
                config.set(key.trim(), value.trim())?;
            }
        }
        for (key, value) in overrides {
            config.set(key, value)?;
        }
        Ok(config)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(CliError::Usage(format!("unknown config key `{key}`"))),
        }
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).expect("registered key")
    }

    pub fn get<T>(&self, key: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.raw(key)
            .parse()
            .map_err(|e| CliError::Usage(format!("invalid value for `{key}`: {e}")))
    }

    /// Keys of the given namespaces plus the global ones, for manifests.
    pub fn section(&self, namespaces: &[&str]) -> BTreeMap<String, String> {
        self.values
            .iter()
            .filter(|(k, _)| !k.contains('.') || namespaces.iter().any(|ns| k.starts_with(&format!("{ns}."))))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    pub fn pretrain(&self) -> Result<PretrainConfig, CliError> {
        let max_row_norm = match self.raw("pretrain.max_row_norm") {
            "" | "none" => None,
            _ => Some(self.get("pretrain.max_row_norm")?),
        };
        let config = PretrainConfig {
            method: self.get("pretrain.method")?,
            dim: self.get("pretrain.dim")?,
            total_samples: self.get("pretrain.total_samples")?,
            epochs: self.get("pretrain.epochs")?,
            negatives: self.get("pretrain.negatives")?,
            learning_rate: self.get("pretrain.learning_rate")?,
            walk_length: self.get("pretrain.walk_length")?,
            walks_per_node: self.get("pretrain.walks_per_node")?,
            window: self.get("pretrain.window")?,
            p: self.get("pretrain.p")?,
            q: self.get("pretrain.q")?,
            seed: self.get("seed")?,
            threads: self.get("threads")?,
            max_row_norm,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn train(&self) -> Result<TrainConfig, CliError> {
        let config = TrainConfig {
            model: self.get("train.model")?,
            entity_dim: self.get("train.entity_dim")?,
            relation_dim: self.get("train.relation_dim")?,
            epochs: self.get("train.epochs")?,
            batch_size: self.get("train.batch_size")?,
            learning_rate: self.get("train.learning_rate")?,
            lr_decay: self.get("train.lr_decay")?,
            label_smoothing: self.get("train.label_smoothing")?,
            input_dropout: self.get("train.input_dropout")?,
            hidden_dropout1: self.get("train.hidden_dropout1")?,
            hidden_dropout2: self.get("train.hidden_dropout2")?,
            use_batchnorm: self.get("train.use_batchnorm")?,
            seed: self.get("seed")?,
            init_mode: self.get("train.init_mode")?,
            dev_every: self.get("train.dev_every")?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn stats(&self) -> Result<StatsOptions, CliError> {
        Ok(StatsOptions {
            path_sample_size: self.get("stats.path_sample_size")?,
            seed: self.get("seed")?,
            exclude_isolated: self.get("stats.exclude_isolated")?,
        })
    }
}

/// Splits `--ns.key value` and `--ns.key=value` pairs out of `args`.
pub fn extract_overrides(args: Vec<String>) -> Result<(Vec<String>, Vec<(String, String)>), CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut overrides = Vec::new();
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        if arg == "--" {
            rest.push(arg);
            rest.extend(iter.by_ref());
            break;
        }
        match arg.strip_prefix("--") {
            Some(name) if name.split('=').next().is_some_and(|k| k.contains('.')) => {
                if let Some((key, value)) = name.split_once('=') {
                    overrides.push((key.to_string(), value.to_string()));
                } else {
                    let value = iter
                        .next()
                        .ok_or_else(|| CliError::Usage(format!("missing value for `--{name}`")))?;
                    overrides.push((name.to_string(), value));
                }
            }
            _ => rest.push(arg),
        }
    }
    Ok((rest, overrides))
}
