//! Randomized exact verification of the pointwise sandwich chains
//!
//!   threshold(rho) <= ramp(rho, rho*) <= threshold(rho*)
//!   threshold(rho) <= scaled(rho)     <= worst-case
//!
//! over random (hypothesis, finite-atom adversary, example) triples, with
//! every comparison in exact rational arithmetic. Zero violations pass.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{
    Adversary, Atom, Hypothesis, Instance, Label, LabeledExample, Perturbation,
};
use crate::error::{Error, Result};
use crate::losses::{self, LossSpec};
use crate::rational::Rational;
use crate::seeding;

use super::report::{Aggregates, Check, ExperimentReport, TrialRecord, Verdict};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichConfig {
    pub triples: usize,
    pub max_atoms: usize,
    pub seed: u64,
}

struct Triple {
    hypothesis: Hypothesis,
    adversary: Adversary,
    example: LabeledExample,
}

fn random_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<Rational> {
    let parts: Vec<i64> = (0..k).map(|_| rng.random_range(1..=9)).collect();
    let total: i64 = parts.iter().sum();
    parts
        .iter()
        .map(|p| Rational::new(*p, total).expect("positive denominator"))
        .collect()
}

fn random_triple(rng: &mut ChaCha8Rng, max_atoms: usize) -> Triple {
    let k = rng.random_range(2..=max_atoms.max(2));
    let weights = random_weights(rng, k);
    let y = if rng.random::<bool>() { Label::PLUS } else { Label::MINUS };
    if rng.random::<bool>() {
        // Abstract domain: image-table atoms and a lookup-table hypothesis.
        let image_range = 10 + 2 * k as u64;
        let atoms: Vec<Atom> = weights
            .into_iter()
            .map(|w| Atom {
                perturbation: Perturbation::Images {
                    images: BTreeMap::from([(0u64, rng.random_range(10..image_range))]),
                },
                weight: w,
            })
            .collect();
        let map: BTreeMap<u64, Label> = (10..image_range)
            .map(|p| (p, if rng.random::<bool>() { Label::PLUS } else { Label::MINUS }))
            .collect();
        Triple {
            hypothesis: Hypothesis::Table {
                map,
                default: Label::PLUS,
            },
            adversary: Adversary::finite(atoms).expect("weights sum to one"),
            example: LabeledExample::point(0, y),
        }
    } else {
        let dim = rng.random_range(1..=3);
        let atoms: Vec<Atom> = weights
            .into_iter()
            .map(|w| Atom {
                perturbation: Perturbation::Translation {
                    translation: (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
                },
                weight: w,
            })
            .collect();
        let w: Vec<f64> = loop {
            let cand: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            if cand.iter().any(|c| *c != 0.0) {
                break cand;
            }
        };
        Triple {
            hypothesis: Hypothesis::Halfspace { w },
            adversary: Adversary::finite(atoms).expect("weights sum to one"),
            example: LabeledExample::new(
                Instance::Vector((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()),
                y,
            ),
        }
    }
}

/// One exact sandwich evaluation; returns the largest violation magnitude
/// (zero when both chains hold).
fn violation(triple: &Triple, rho: Rational, rho_star: Rational, scaled_rho: Rational) -> Result<(Rational, [Rational; 5])> {
    let atoms = triple.adversary.as_finite().expect("finite by construction");
    let exact = |spec: &LossSpec| {
        losses::pointwise_loss_rational(spec, &triple.hypothesis, atoms, &triple.example)
    };
    let l_rho = exact(&LossSpec::rho_threshold(rho)?)?;
    let l_ramp = exact(&LossSpec::ramp(rho, rho_star)?)?;
    let l_rho_star = exact(&LossSpec::rho_threshold(rho_star)?)?;
    let l_scaled_thresh = exact(&LossSpec::rho_threshold(scaled_rho)?)?;
    let l_scaled = exact(&LossSpec::scaled_ramp(scaled_rho)?)?;
    let l_worst = exact(&LossSpec::WorstCase)?;
    let zero = Rational::zero();
    let worst_violation = [
        l_rho - l_ramp,
        l_ramp - l_rho_star,
        l_scaled_thresh - l_scaled,
        l_scaled - l_worst,
    ]
    .into_iter()
    .fold(zero, Rational::max);
    Ok((worst_violation, [l_rho, l_ramp, l_rho_star, l_scaled, l_worst]))
}

pub fn run_sandwich(cfg: &SandwichConfig) -> Result<ExperimentReport> {
    if cfg.triples == 0 || cfg.max_atoms < 2 {
        return Err(Error::Invalid("need triples >= 1 and max_atoms >= 2".into()));
    }
    let records: Vec<TrialRecord> = (0..cfg.triples)
        .into_par_iter()
        .map(|t| -> Result<TrialRecord> {
            let trial_seed = seeding::derive(cfg.seed, "sandwich", t as u64);
            let mut rng = seeding::rng_from(trial_seed);
            let triple = random_triple(&mut rng, cfg.max_atoms);
            // rho* < rho over a twentieths grid; the scaled chain draws its
            // own threshold in (0, 1).
            let a = rng.random_range(0..19);
            let b = rng.random_range(a + 1..=19);
            let rho_star = Rational::new(a, 20)?;
            let rho = Rational::new(b, 20)?;
            let scaled_rho = Rational::new(rng.random_range(1..=19), 20)?;
            let (violation, losses_out) = violation(&triple, rho, rho_star, scaled_rho)?;
            Ok(TrialRecord {
                trial: t as u64,
                seed: trial_seed,
                n: 1,
                emp_risk: losses_out[1].to_f64(),  // ramp
                pop_risk: losses_out[0].to_f64(),  // threshold at rho
                benchmark: losses_out[2].to_f64(), // threshold at rho*
                excess: violation.to_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let violations = records.iter().filter(|r| r.excess > 0.0).count();
    let checks = vec![Check::at_most("sandwich_violations", violations as f64, 0.0)];
    let config = serde_json::to_value(cfg).expect("config serializes");
    let aggregates = Aggregates::from_records(&records, Some(0.0));
    Ok(ExperimentReport::new(
        config,
        records,
        aggregates,
        Verdict::from_checks(
            "pointwise, exact rationals: threshold(rho) <= ramp(rho,rho*) <= threshold(rho*) \
             and threshold(rho) <= scaled(rho) <= worst-case; zero violations",
            None,
            checks,
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_has_no_violations() {
        let report = run_sandwich(&SandwichConfig {
            triples: 500,
            max_atoms: 6,
            seed: 99,
        })
        .unwrap();
        assert!(report.verdict.pass);
        assert!(report.records.iter().all(|r| r.excess == 0.0));
    }
}
