//! Statistical properties of the smoothed-margin engine: the affine
//! identity, seed-independence of exact atoms, Monte Carlo concentration,
//! and the ball sampler's support and centering.

use std::collections::BTreeMap;

use proptest::prelude::*;

use probrobust_core::domain::{
    prob_mistake, prob_mistake_rational, sample_lp_ball, smoothed_margin,
    smoothed_margin_rational, Adversary, Atom, Hypothesis, Label, LabeledExample, NormOrder,
    Perturbation,
};
use probrobust_core::rational::Rational;
use probrobust_core::seeding;

fn atom_adversary(parts: &[i64], images: &[u64]) -> Adversary {
    let total: i64 = parts.iter().sum();
    Adversary::finite(
        parts
            .iter()
            .zip(images)
            .map(|(p, img)| Atom {
                perturbation: Perturbation::Images {
                    images: BTreeMap::from([(0u64, *img)]),
                },
                weight: Rational::new(*p, total).unwrap(),
            })
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn affine_identity_exact_on_atoms(
        parts in proptest::collection::vec(1i64..12, 2..8),
        labels in proptest::collection::vec(any::<bool>(), 16),
        y in any::<bool>(),
    ) {
        let images: Vec<u64> = (0..parts.len() as u64).map(|i| 10 + i % 16).collect();
        let adv = atom_adversary(&parts, &images);
        let map: BTreeMap<u64, Label> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (10 + i as u64, if *l { Label::PLUS } else { Label::MINUS }))
            .collect();
        let h = Hypothesis::Table { map, default: Label::PLUS };
        let ex = LabeledExample::point(0, if y { Label::PLUS } else { Label::MINUS });
        let atoms = adv.as_finite().unwrap();

        let margin = smoothed_margin_rational(&h, atoms, &ex).unwrap();
        let p = prob_mistake_rational(&h, atoms, &ex).unwrap();
        prop_assert_eq!(p, (Rational::one() - margin) * Rational::new(1, 2).unwrap());
        prop_assert!(margin >= -Rational::one() && margin <= Rational::one());

        // The float path agrees with the exact one and ignores the seed.
        let f1 = smoothed_margin(&h, &adv, &ex, 1).unwrap();
        let f2 = smoothed_margin(&h, &adv, &ex, 77).unwrap();
        prop_assert_eq!(f1, f2);
        prop_assert_eq!(f1, margin.to_f64());
        prop_assert_eq!(prob_mistake(&h, &adv, &ex, 1).unwrap(), (1.0 - f1) / 2.0);
    }
}

#[test]
fn monte_carlo_estimates_concentrate() {
    // Two independent estimates at n_mc = 10^4 differ by at most
    // 2 * sqrt(ln(40) / (2 * 10^4)) in at least 95% of 100 repetitions.
    let adv = Adversary::lp_ball(NormOrder::Two, 0.8, 10_000, 17).unwrap();
    let h = Hypothesis::halfspace(vec![1.0, 0.4]).unwrap();
    // A point whose margin is comfortably inside (0, 1): variance well below
    // the worst case.
    let ex = LabeledExample::vector(&[0.35, 0.1], Label::PLUS);
    let bound = 2.0 * (40.0f64.ln() / (2.0 * 10_000.0)).sqrt();
    let mut within = 0;
    for rep in 0..100u64 {
        let a = smoothed_margin(&h, &adv, &ex, 2 * rep).unwrap();
        let b = smoothed_margin(&h, &adv, &ex, 2 * rep + 1).unwrap();
        if (a - b).abs() <= bound {
            within += 1;
        }
    }
    assert!(within >= 95, "only {within}/100 repetitions within {bound}");
}

#[test]
fn ball_sampler_support_and_centering() {
    for p in [
        NormOrder::One,
        NormOrder::Two,
        NormOrder::Inf,
        NormOrder::General(3.0),
    ] {
        for dim in [2usize, 5] {
            let gamma = 0.7;
            let n = 100_000;
            let mut rng = seeding::rng_from(23);
            let mut mean = vec![0.0; dim];
            for _ in 0..n {
                let d = sample_lp_ball(&p, gamma, dim, &mut rng);
                assert!(
                    p.norm(&d) <= gamma,
                    "draw escaped the ball: p = {p:?}, dim = {dim}"
                );
                for (m, c) in mean.iter_mut().zip(&d) {
                    *m += c / n as f64;
                }
            }
            assert!(
                p.norm(&mean) <= 0.05 * gamma,
                "mean {mean:?} too far from origin for p = {p:?}, dim = {dim}"
            );
        }
    }
}

#[test]
fn sine_sign_oddness_invariant() {
    let mut rng = seeding::rng_from(31);
    for _ in 0..1000 {
        use rand::Rng;
        let omega: f64 = rng.random_range(-5.0..5.0);
        let x: f64 = rng.random_range(-5.0..5.0);
        if (omega * x).sin() == 0.0 {
            continue;
        }
        let h = Hypothesis::SineSign { omega };
        let a = h
            .evaluate(&probrobust_core::Instance::Vector(vec![x]))
            .unwrap();
        let b = h
            .evaluate(&probrobust_core::Instance::Vector(vec![-x]))
            .unwrap();
        assert_eq!(a, b.flipped(), "oddness failed at omega={omega}, x={x}");
    }
}
