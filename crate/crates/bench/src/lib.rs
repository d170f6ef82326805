//! Seeded inputs for the indicator benchmarks.

use paretogap::{Assignment, CostVector, EvaluationRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` uniform points in the unit box.
pub fn random_points(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect()
}

/// `n` mutually non-dominated points on the sphere octant `sum x_i^2 = 1`.
pub fn spherical_front(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(0.01..1.0f64)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect()
}

/// Records whose test costs are the validation costs plus uniform noise.
pub fn noisy_records(n: usize, dim: usize, shift: f64, seed: u64) -> Vec<EvaluationRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let val: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
            let test: Vec<f64> = val
                .iter()
                .map(|v| v + rng.random_range(-shift..=shift))
                .collect();
            EvaluationRecord::complete(
                format!("r{i}"),
                Assignment::new(),
                CostVector::new(val).expect("finite"),
                Some(CostVector::new(test).expect("finite")),
                i as u64,
            )
            .expect("same dimension")
        })
        .collect()
}
