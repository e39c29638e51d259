//! Exhaustive checks of the lower-bound construction: per-center block
//! masses, loss behaviors equal to bitstrings, pairwise non-shattering over
//! the full discrete domain, the perturbation-model round trip, and the
//! linked two-part variant.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use proptest::prelude::*;

use probrobust_core::complexity::{loss_class_vc, loss_shatter_check, shatter_check, vc_dimension};
use probrobust_core::constructions::{
    build_construction, build_linked_constructions, g_u_convert, hard_distribution_experiment,
    ConstructionFilter,
};
use probrobust_core::domain::{prob_mistake_rational, Hypothesis, Label, LabeledExample};
use probrobust_core::losses::LossSpec;
use probrobust_core::rational::Rational;

const BUDGET: u64 = 1_000_000_000;

fn rho_values() -> Vec<Rational> {
    vec![
        Rational::zero(),
        Rational::new(1, 4).unwrap(),
        Rational::new(1, 2).unwrap(),
    ]
}

#[test]
fn per_center_block_masses_are_exact() {
    for rho in rho_values() {
        for m in [1usize, 3, 4] {
            let built = build_construction(m, rho, ConstructionFilter::All).unwrap();
            let geo = &built.geometry;
            let one_minus = Rational::one() - rho;
            // Remainder mass (1 - rho)/2, optional mass-rho block, labeled
            // blocks of (1 - rho)/2^m each.
            assert_eq!(geo.atom_weight(0).unwrap(), one_minus * Rational::new(1, 2).unwrap());
            let labeled_base = if rho.is_positive() {
                assert_eq!(geo.atom_weight(1).unwrap(), rho);
                2
            } else {
                1
            };
            let labeled = one_minus * Rational::new(1, 1i64 << m).unwrap();
            let mut total = Rational::zero();
            for k in 0..geo.atom_count() {
                if k >= labeled_base {
                    assert_eq!(geo.atom_weight(k).unwrap(), labeled);
                }
                total = total + geo.atom_weight(k).unwrap();
            }
            assert_eq!(total, Rational::one());
            assert_eq!(geo.atom_count(), labeled_base + (1 << (m - 1)));
        }
    }
}

#[test]
fn loss_behavior_equals_bitstring_exhaustively() {
    // For m <= 5 and each rho, the threshold loss of h_b on (c_i, +1) is
    // exactly b_i.
    for rho in rho_values() {
        for m in [3usize, 4, 5] {
            let built = build_construction(m, rho, ConstructionFilter::All).unwrap();
            let atoms = built.adversary.as_finite().unwrap();
            for bits in 0..(1u64 << m) {
                let h = built.class.member(bits);
                for (i, ex) in built.centers.examples().iter().enumerate() {
                    let p = prob_mistake_rational(&h, atoms, ex).unwrap();
                    let expected = bits & (1 << i) != 0;
                    assert_eq!(p > rho, expected, "m={m} rho={rho} bits={bits:b} center={i}");
                    // The mistake mass itself: rho plus the labeled block.
                    let want = if expected {
                        rho + (Rational::one() - rho) * Rational::new(1, 1i64 << m).unwrap()
                    } else {
                        rho
                    };
                    assert_eq!(p, want);
                }
            }
        }
    }
}

#[test]
fn construction_class_never_shatters_pairs() {
    // Exhaustive pairwise non-shattering over the full discrete domain for
    // m <= 4.
    for rho in rho_values() {
        for m in [2usize, 3, 4] {
            let built = build_construction(m, rho, ConstructionFilter::All).unwrap();
            let points = built.geometry.domain_points();
            let vc = vc_dimension(&built.class, &points, 2, BUDGET).unwrap();
            assert!(vc <= 1, "m={m} rho={rho}: some pair shattered");
            // Single points are shattered (both labels occur), so exactly 1.
            assert_eq!(vc, 1);
        }
    }
}

#[test]
fn loss_class_shatters_the_centers() {
    for rho in rho_values() {
        for m in [3usize, 4] {
            let built = build_construction(m, rho, ConstructionFilter::All).unwrap();
            let spec = LossSpec::rho_threshold(rho).unwrap();
            assert!(loss_shatter_check(
                &spec,
                &built.class,
                &built.adversary,
                built.centers.examples(),
                BUDGET
            )
            .unwrap());
            assert_eq!(
                loss_class_vc(&spec, &built.class, &built.adversary, built.centers.examples(), m, BUDGET)
                    .unwrap(),
                m
            );
        }
    }
}

#[test]
fn worst_case_loss_class_blows_up_at_rho_zero() {
    // With rho = 0 the worst-case loss over the atoms equals the threshold
    // loss, so the worst-case loss class also shatters the centers while the
    // class itself has VC 1.
    for m in [3usize, 4, 5] {
        let built = build_construction(m, Rational::zero(), ConstructionFilter::All).unwrap();
        let vc_class = vc_dimension(&built.class, &built.geometry.domain_points(), 2, BUDGET).unwrap();
        let vc_loss = loss_class_vc(
            &LossSpec::WorstCase,
            &built.class,
            &built.adversary,
            built.centers.examples(),
            m,
            BUDGET,
        )
        .unwrap();
        assert!(vc_loss >= vc_class + m - 1, "blow-up gap too small at m={m}");
    }
}

#[test]
fn filtered_class_counts_and_membership() {
    let built = build_construction(
        6,
        Rational::new(1, 4).unwrap(),
        ConstructionFilter::ExactWeight { k: 2 },
    )
    .unwrap();
    assert_eq!(built.class.len(), 15); // C(6, 2)
    let mut seen = BTreeSet::new();
    for i in 0..built.class.len() {
        let Hypothesis::Construction { bits, .. } = built.class.member(i) else { panic!() };
        assert_eq!(bits.count_ones(), 2);
        assert!(seen.insert(bits), "duplicate member");
    }
}

#[test]
fn linked_parts_keep_vc_one_over_the_union_domain() {
    let rho = Rational::new(1, 4).unwrap();
    for (m1, m2) in [(3usize, 6usize), (2, 4)] {
        let built = build_linked_constructions(m1, m2, rho, ConstructionFilter::All).unwrap();
        let points = built.geometry.domain_points();
        let vc = vc_dimension(&built.class, &points, 2, BUDGET).unwrap();
        assert!(vc <= 1, "linked ({m1}, {m2}) shattered a pair");
        // Each part still shatters its own centers through the loss class.
        let spec = LossSpec::rho_threshold(rho).unwrap();
        let first_centers: Vec<LabeledExample> = (0..m1)
            .map(|i| LabeledExample::point(built.geometry.center_id(0, i), Label::PLUS))
            .collect();
        assert!(
            loss_shatter_check(&spec, &built.class, &built.adversary, &first_centers, BUDGET)
                .unwrap()
        );
    }
}

#[test]
fn matched_distribution_admits_a_zero_risk_member() {
    // On a uniform distribution over 2m of the 3m centers, the weight-m
    // bitstring supported off-distribution has exact population risk zero.
    let m = 3usize;
    let rho = Rational::new(1, 4).unwrap();
    let built =
        build_construction(3 * m, rho, ConstructionFilter::ExactWeight { k: m as u32 }).unwrap();
    let support: Vec<LabeledExample> = built.centers.examples()[..2 * m].to_vec();
    let dist = probrobust_core::Distribution::uniform(&support).unwrap();
    let spec = LossSpec::rho_threshold(rho).unwrap();
    let star = (0..built.class.len())
        .map(|i| built.class.member(i))
        .find(|h| {
            let Hypothesis::Construction { bits, .. } = h else { panic!() };
            // Ones exactly on the m off-support centers.
            (0..2 * m).all(|i| bits & (1 << i) == 0)
        })
        .expect("off-support member exists");
    let risk = probrobust_core::losses::population_risk(&spec, &star, &built.adversary, &dist, 0)
        .unwrap();
    assert_eq!(risk, 0.0);
}

#[test]
fn hard_distribution_realizability_and_risk_floor_small() {
    // A small run of the hard-distribution experiment: every sampled
    // distribution admits a zero-risk member, and the mean risk clears the
    // floor (m = 2 keeps it fast; the acceptance suite runs m = 4).
    let report = hard_distribution_experiment(2, Rational::new(1, 4).unwrap(), 10, 20, 42).unwrap();
    assert!(report.records.iter().all(|r| r.benchmark == 0.0));
    let mean: f64 =
        report.records.iter().map(|r| r.pop_risk).sum::<f64>() / report.records.len() as f64;
    assert!(mean >= 0.2, "mean population risk {mean} under the floor");
    assert!(report.verdict.pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn perturbation_model_round_trip(
        image_lists in proptest::collection::vec(
            proptest::collection::btree_set(0u64..10, 1..=5),
            1..=10,
        ),
    ) {
        let u_map: BTreeMap<u64, BTreeSet<u64>> = image_lists
            .into_iter()
            .enumerate()
            .map(|(i, set)| (i as u64, set))
            .collect();
        let g = g_u_convert(&u_map).unwrap();
        for (x, images) in &u_map {
            prop_assert_eq!(&g.images_of(*x), images, "images mismatch at point {}", x);
        }
        // Every constructed function is total over the domain.
        for f in &g.functions {
            for x in u_map.keys() {
                prop_assert!(f.contains_key(x));
            }
        }
    }
}

#[test]
fn empty_image_sets_are_rejected() {
    let mut u = BTreeMap::from([(0u64, BTreeSet::from([1u64]))]);
    u.insert(5, BTreeSet::new());
    match g_u_convert(&u) {
        Err(probrobust_core::Error::EmptyImageSet(5)) => {}
        other => panic!("expected EmptyImageSet(5), got {other:?}"),
    }
}

#[test]
fn construction_hypotheses_reference_their_geometry() {
    let built = build_construction(3, Rational::new(1, 2).unwrap(), ConstructionFilter::All).unwrap();
    let Hypothesis::Construction { geometry, bits, part } = built.class.member(5) else {
        panic!()
    };
    assert_eq!(bits, 5);
    assert_eq!(part, 0);
    assert!(Arc::ptr_eq(&geometry, &built.geometry) || *geometry == *built.geometry);
    geometry.validate_hypothesis(part, bits).unwrap();
    assert!(geometry.validate_hypothesis(0, 8).is_err()); // 3 centers -> bits < 8
}
