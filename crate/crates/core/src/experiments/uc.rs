//! Uniform-convergence experiment for Lipschitz losses: measures
//! G(n) = sup_h |population risk - empirical risk| across sample sizes and
//! checks monotone decay plus a C/sqrt(n) envelope.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Adversary, Distribution};
use crate::error::{Error, Result};
use crate::learners::HypothesisClass;
use crate::losses::{self, LossSpec};
use crate::seeding;

use super::report::{Aggregates, Check, ExperimentReport, TrialRecord, Verdict};
use super::risk_table::RiskTable;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UcConfig {
    pub class: HypothesisClass,
    pub adversary: Adversary,
    pub distribution: Distribution,
    pub loss: LossSpec,
    /// Strictly increasing sample sizes.
    pub sizes: Vec<usize>,
    pub trials_per_size: usize,
    /// Allowed spread of median_gap * sqrt(n) across the size list.
    pub envelope_factor: f64,
    pub seed: u64,
}

impl UcConfig {
    /// The standard instance: a 40-direction planar halfspace grid, hinge
    /// loss, a 3-atom translation adversary, and a 30-point noisy planted
    /// support.
    pub fn halfspace_hinge(sizes: Vec<usize>, trials_per_size: usize, seed: u64) -> Result<UcConfig> {
        use rand::Rng;
        let mut rng = seeding::rng_from(seeding::derive(seed, "uc-instance", 0));
        let adversary = Adversary::uniform_translations(vec![
            vec![0.0, 0.0],
            vec![0.15, -0.1],
            vec![-0.1, 0.2],
        ])?;
        let planted = [rng.random_range(-1.0..1.0f64), rng.random_range(-1.0..1.0)];
        let support: Vec<crate::domain::LabeledExample> = (0..30)
            .map(|_| {
                let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let dot = planted[0] * x[0] + planted[1] * x[1];
                let mut y = crate::domain::Label::from_sign_of(dot);
                if rng.random::<f64>() < 0.1 {
                    y = y.flipped();
                }
                crate::domain::LabeledExample::vector(&x, y)
            })
            .collect();
        Ok(UcConfig {
            class: HypothesisClass::halfspace_grid(2, 40, seeding::derive(seed, "uc-grid", 0))?,
            adversary,
            distribution: Distribution::uniform(&support)?,
            loss: LossSpec::Hinge,
            sizes,
            trials_per_size,
            envelope_factor: 3.0,
            seed,
        })
    }
}

/// Verdict checks, recomputable from the records (rows carry their n).
pub fn uc_checks(records: &[TrialRecord], sizes: &[usize], envelope_factor: f64) -> Vec<Check> {
    let median_gap = |n: usize| -> f64 {
        let mut gaps: Vec<f64> = records
            .iter()
            .filter(|r| r.n == n)
            .map(|r| r.excess)
            .collect();
        gaps.sort_by(f64::total_cmp);
        super::report::quantile(&gaps, 0.5)
    };
    let first = median_gap(sizes[0]);
    let last = median_gap(*sizes.last().expect("non-empty sizes"));
    let scaled: Vec<f64> = sizes
        .iter()
        .map(|n| median_gap(*n) * (*n as f64).sqrt())
        .collect();
    let hi = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    vec![
        Check::less_than("median_gap_at_n_max_below_n_min", last, first),
        Check::at_most("sqrt_n_envelope_ratio", ratio, envelope_factor),
    ]
}

pub fn run_uniform_convergence(cfg: &UcConfig) -> Result<ExperimentReport> {
    if losses::lipschitz_constant(&cfg.loss).is_none() {
        return Err(Error::NonLipschitz(cfg.loss.name().into()));
    }
    if cfg.sizes.is_empty() || cfg.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("sample sizes must be non-empty and strictly increasing".into()));
    }
    if cfg.trials_per_size == 0 {
        return Err(Error::Invalid("trials_per_size must be at least 1".into()));
    }
    let Distribution::FiniteSupport { support } = &cfg.distribution else {
        return Err(Error::Invalid(
            "uniform-convergence experiment needs a finite-support distribution \
             so population risks are exact"
                .into(),
        ));
    };
    let table = RiskTable::build(&cfg.loss, &cfg.class, &cfg.adversary, support)?;
    let pop: Vec<f64> = (0..table.class_len()).map(|h| table.pop_risk(h)).collect();

    let jobs: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(si, _)| (0..cfg.trials_per_size).map(move |t| (si, t)))
        .collect();
    let records: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|(si, t)| {
            let n = cfg.sizes[*si];
            let trial = (*si * cfg.trials_per_size + *t) as u64;
            let trial_seed = seeding::derive(cfg.seed, "uc", trial);
            let sample = cfg
                .distribution
                .sample_indices(n, seeding::derive(trial_seed, "sample", 0))
                .expect("finite support checked above");
            let mut worst = (0usize, -1.0f64, 0.0f64);
            for (h, pop_h) in pop.iter().enumerate() {
                let emp = table.emp_risk(h, &sample);
                let gap = (pop_h - emp).abs();
                if gap > worst.1 {
                    worst = (h, gap, emp);
                }
            }
            TrialRecord {
                trial,
                seed: trial_seed,
                n,
                emp_risk: worst.2,
                pop_risk: pop[worst.0],
                benchmark: 0.0,
                excess: worst.1,
            }
        })
        .collect();

    let checks = uc_checks(&records, &cfg.sizes, cfg.envelope_factor);
    let mut config = serde_json::to_value(cfg).expect("config serializes");
    let medians: Vec<(usize, f64)> = cfg
        .sizes
        .iter()
        .map(|n| {
            let mut gaps: Vec<f64> = records
                .iter()
                .filter(|r| r.n == *n)
                .map(|r| r.excess)
                .collect();
            gaps.sort_by(f64::total_cmp);
            (*n, super::report::quantile(&gaps, 0.5))
        })
        .collect();
    config["median_gap_per_n"] = serde_json::to_value(&medians).expect("medians");
    let aggregates = Aggregates::from_records(&records, None);
    Ok(ExperimentReport::new(
        config,
        records,
        aggregates,
        Verdict::from_checks(
            "sup-gap over the class decays like sqrt(d ln n / n): median gap strictly \
             decreasing from n_min to n_max and median * sqrt(n) within the envelope factor",
            Some(*cfg.sizes.last().expect("non-empty")),
            checks,
        ),
    ))
}
