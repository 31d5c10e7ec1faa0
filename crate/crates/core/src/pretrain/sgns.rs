use super::config::PretrainConfig;
use super::negative::{unigram_noise, NegativeSampler, Scratch};
use super::shared::SharedTable;
use super::walk::WalkCorpus;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::rng::{self, ChaCha8Rng};

/// `(center, context)` pairs at distance `1..=window` inside one walk.
pub fn window_pairs(walk: &[usize], window: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
    walk.iter().enumerate().flat_map(move |(i, &center)| {
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(walk.len() - 1);
        (lo..=hi).filter(move |&j| j != i).map(move |j| (center, walk[j]))
    })
}

/// Skip-gram with negative sampling over a walk corpus; returns the center
/// (input) vectors.
pub fn sgns_train(corpus: &WalkCorpus, config: &PretrainConfig, node_count: usize) -> Result<EmbeddingMatrix> {
    Ok(train(corpus, config, node_count, false)?.0)
}

/// Like [`sgns_train`], also returning the mean log-likelihood of all
/// training pairs (against a fixed set of noise draws) before training and
/// after every epoch.
pub fn sgns_train_logged(
    corpus: &WalkCorpus,
    config: &PretrainConfig,
    node_count: usize,
) -> Result<(EmbeddingMatrix, Vec<f64>)> {
    train(corpus, config, node_count, true)
}

fn train(
    corpus: &WalkCorpus,
    config: &PretrainConfig,
    node_count: usize,
    track: bool,
) -> Result<(EmbeddingMatrix, Vec<f64>)> {
    config.validate()?;
    if corpus.walks.iter().all(|w| w.len() < 2) {
        return Err(Error::EmptyCorpus);
    }
    let mut counts = vec![0.0; node_count];
    for &v in corpus.walks.iter().flatten() {
        if v >= node_count {
            return Err(Error::IdOutOfRange {
                kind: "node",
                id: v,
                size: node_count,
            });
        }
        counts[v] += 1.0;
    }
    // Visit frequency of an unbiased walk is proportional to degree.
    let noise = unigram_noise(counts)?;

    let dim = config.dim;
    let mut rng = rng::seeded(config.seed);
    let centers = SharedTable::from_matrix(&EmbeddingMatrix::uniform(node_count, dim, 0.5 / dim as f64, &mut rng));
    let contexts = SharedTable::from_matrix(&EmbeddingMatrix::zeros(node_count, dim));
    let sampler = NegativeSampler {
        sources: &centers,
        targets: &contexts,
        noise: &noise,
        negatives: config.negatives,
        max_row_norm: config.max_row_norm,
    };

    let pairs_per_epoch: u64 = corpus
        .walks
        .iter()
        .map(|w| window_pairs(w, config.window).count() as u64)
        .sum();
    let threads = config.threads.max(1);
    let total = pairs_per_epoch * config.epochs as u64;
    let eval_seed = rng::mix_seed(config.seed, 0x4556_414c);

    let objective = |sampler: &NegativeSampler| {
        let mut rng = rng::seeded(eval_seed);
        let mut buf = Scratch::new(dim);
        let sum: f64 = corpus
            .walks
            .iter()
            .flat_map(|w| window_pairs(w, config.window))
            .map(|(c, o)| sampler.log_likelihood(c, o, &mut rng, &mut buf))
            .sum();
        sum / pairs_per_epoch as f64
    };

    let mut log = Vec::new();
    if track {
        log.push(objective(&sampler));
    }
    let run = |walks: &[Vec<usize>], rng: &mut ChaCha8Rng, mut done: u64, stride: u64| {
        let mut buf = Scratch::new(dim);
        for walk in walks {
            for (c, o) in window_pairs(walk, config.window) {
                sampler.step(c, o, config.rate_at(done, total), rng, &mut buf);
                done += stride;
            }
        }
    };
    let chunk = corpus.walks.len().div_ceil(threads);
    let mut worker_rngs: Vec<ChaCha8Rng> = (1..threads as u64)
        .map(|w| rng::seeded_stream(config.seed, w))
        .collect();
    for epoch in 0..config.epochs as u64 {
        let done = epoch * pairs_per_epoch;
        if threads == 1 {
            run(&corpus.walks, &mut rng, done, 1);
        } else {
            // Each worker advances the shared schedule by `threads` per pair,
            // approximating the global progress.
            let (first, rest) = corpus.walks.split_at(chunk.min(corpus.walks.len()));
            std::thread::scope(|scope| {
                for (walks, wrng) in rest.chunks(chunk).zip(worker_rngs.iter_mut()) {
                    let run = &run;
                    scope.spawn(move || run(walks, wrng, done, threads as u64));
                }
                run(first, &mut rng, done, threads as u64);
            });
        }
        if track {
            log.push(objective(&sampler));
        }
    }
    Ok((centers.into_matrix(node_count), log))
}
