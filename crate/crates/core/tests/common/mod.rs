#![allow(dead_code)]

use linconvex::dataio::Dataset;
use linconvex::SparseExample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random sparse data around a hidden linear model. Classification labels
/// are ±1 with `flip` of them inverted; otherwise labels are noisy scores.
pub fn synthetic(seed: u64, n: usize, m: usize, density: f64, classification: bool, flip: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut examples = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let mut entries = Vec::new();
        for j in 0..m {
            if rng.random::<f64>() < density {
                entries.push((j, rng.random_range(-1.0..1.0)));
            }
        }
        if entries.is_empty() {
            entries.push((rng.random_range(0..m), 1.0));
        }
        let x = SparseExample::new(entries).unwrap();
        let score = x.dot(&truth) + 0.1 * rng.random_range(-1.0..1.0);
        let y = if classification {
            let s = if score >= 0.0 { 1.0 } else { -1.0 };
            if rng.random::<f64>() < flip { -s } else { s }
        } else {
            score
        };
        examples.push(x);
        labels.push(y);
    }
    Dataset::new(examples, labels, m).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(-scale..scale)).collect()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
