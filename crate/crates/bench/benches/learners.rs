use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use probrobust_bench::{halfspace_grid, random_vector_dataset, translation_adversary};
use probrobust_core::constructions::{build_construction, ConstructionFilter};
use probrobust_core::learners::{erm, prerm, ErmOptions};
use probrobust_core::losses::LossSpec;
use probrobust_core::Rational;

fn bench_learners(c: &mut Criterion) {
    let class = halfspace_grid(3, 200, 11);
    let adv = translation_adversary(8, 3, 2);
    let data = random_vector_dataset(100, 3, 3);
    let opts = ErmOptions::default();
    c.bench_function("erm/hinge_grid200_n100", |b| {
        b.iter(|| erm(&LossSpec::Hinge, black_box(&class), &adv, &data, &opts).unwrap())
    });

    let rho = Rational::new(1, 4).unwrap();
    let built = build_construction(12, rho, ConstructionFilter::ExactWeight { k: 4 }).unwrap();
    let sample = probrobust_core::Distribution::uniform(&built.centers.examples()[..8])
        .unwrap()
        .sample(4, 9)
        .unwrap();
    c.bench_function("prerm/construction_c12_k4", |b| {
        b.iter(|| prerm(rho, black_box(&built.class), &built.adversary, &sample, &opts).unwrap())
    });
}

criterion_group!(benches, bench_learners);
criterion_main!(benches);
