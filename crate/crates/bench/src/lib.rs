//! Benchmark-only crate; see the `benches/` directory.
//!
//! Shared fixture builders for the criterion benchmarks.

use probrobust_core::domain::{Adversary, Dataset, Label, LabeledExample};
use probrobust_core::learners::HypothesisClass;
use probrobust_core::seeding;

pub fn translation_adversary(atoms: usize, dim: usize, seed: u64) -> Adversary {
    use rand::Rng;
    let mut rng = seeding::rng_from(seed);
    let mut translations = vec![vec![0.0; dim]];
    for _ in 1..atoms {
        translations.push((0..dim).map(|_| rng.random_range(-0.3..0.3)).collect());
    }
    Adversary::uniform_translations(translations).expect("non-empty")
}

pub fn random_vector_dataset(n: usize, dim: usize, seed: u64) -> Dataset {
    use rand::Rng;
    let mut rng = seeding::rng_from(seed);
    Dataset::new(
        (0..n)
            .map(|_| {
                let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                let y = if rng.random::<bool>() { Label::PLUS } else { Label::MINUS };
                LabeledExample::new(probrobust_core::Instance::Vector(x), y)
            })
            .collect(),
    )
    .expect("non-empty")
}

pub fn halfspace_grid(dim: usize, count: usize, seed: u64) -> HypothesisClass {
    HypothesisClass::halfspace_grid(dim, count, seed).expect("valid grid")
}
