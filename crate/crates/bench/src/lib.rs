//! Shared fixtures for the criterion benches.

use netpeace_core::kgdata::Dataset;
use netpeace_core::rng::seeded;
use rand::Rng;

/// Random KG in the text format, split 80/10/10, with labels `e{i}` and `r{j}`.
pub fn synthetic_dataset(seed: u64, entities: usize, relations: usize, triples: usize) -> Dataset {
    let mut rng = seeded(seed);
    let mut lines = Vec::with_capacity(triples);
    for _ in 0..triples {
        let h = rng.random_range(0..entities);
        let mut t = rng.random_range(0..entities - 1);
        if t >= h {
            t += 1;
        }
        let r = rng.random_range(0..relations);
        lines.push(format!("e{h}\tr{r}\te{t}\n"));
    }
    let n_valid = (triples / 10).max(1);
    let (test, rest) = lines.split_at(n_valid);
    let (valid, train) = rest.split_at(n_valid);
    Dataset::from_texts(&train.concat(), &valid.concat(), &test.concat()).expect("synthetic dataset")
}

/// Heavy-tailed positive weights, roughly like node degrees.
pub fn degree_weights(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = seeded(seed);
    (0..n).map(|_| 1.0 / rng.random_range(0.001..1.0f64)).collect()
}
