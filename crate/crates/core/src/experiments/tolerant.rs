//! Tolerant robust learning: worst-case ERM over a translation grid of
//! radius 3r, evaluated on the sub-grid of radius r, against the exhaustive
//! worst-case benchmark on the full grid. The greedy covering number of the
//! 2r-inflated sub-grid is reported as the bound's complexity term.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::{covering_number_greedy, MetricSpaceSample};
use crate::domain::{Adversary, Distribution, Instance, Label, LabeledExample, NormOrder};
use crate::error::{Error, Result};
use crate::learners::{HypothesisClass, TieBreak};
use crate::losses::LossSpec;
use crate::seeding;

use super::report::{Aggregates, Check, ExperimentReport, TrialRecord, Verdict};
use super::risk_table::RiskTable;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TolerantConfig {
    /// Number of unit directions in the halfspace grid (member 0 is the
    /// planted data direction).
    pub directions: usize,
    pub class_seed: u64,
    pub p: NormOrder,
    pub r: f64,
    /// Radial rings of the big grid (ring k has radius k * 3r / rings).
    pub rings: usize,
    /// Angular resolution per ring.
    pub angular: usize,
    pub support_points: usize,
    /// 0 gives the separable variant (every trial must reach zero risk on
    /// the small grid); positive values flip labels with that probability.
    pub label_noise: f64,
    /// Extra margin beyond 3r for separable data.
    pub margin_slack: f64,
    /// Test mode: evaluate on the full grid instead of the radius-r sub-grid.
    pub collapse_small_grid: bool,
    pub eps: f64,
    pub delta: f64,
    pub trials: usize,
    pub n_override: Option<usize>,
    pub max_doublings: usize,
    pub n_cap: usize,
    pub seed: u64,
}

impl TolerantConfig {
    /// The standard planar instance: an l_2 grid of 3 rings by 12 angles out
    /// to 3r, a direction grid of the given size, and margin-separated data
    /// with optional label noise.
    pub fn standard(
        r: f64,
        directions: usize,
        label_noise: f64,
        trials: usize,
        eps: f64,
        delta: f64,
        seed: u64,
    ) -> TolerantConfig {
        TolerantConfig {
            directions,
            class_seed: seeding::derive(seed, "tolerant-grid", 0),
            p: NormOrder::Two,
            r,
            rings: 3,
            angular: 12,
            support_points: 10,
            label_noise,
            margin_slack: 0.3,
            collapse_small_grid: false,
            eps,
            delta,
            trials,
            n_override: None,
            max_doublings: 4,
            n_cap: 200_000,
            seed,
        }
    }
}

/// Planar translation grid out to `radius`: the origin plus `rings` rings of
/// `angular` points each.
fn translation_grid(radius: f64, rings: usize, angular: usize) -> Vec<Vec<f64>> {
    let mut grid = vec![vec![0.0, 0.0]];
    for ring in 1..=rings {
        let rad = radius * ring as f64 / rings as f64;
        for a in 0..angular {
            let theta = 2.0 * std::f64::consts::PI * a as f64 / angular as f64;
            grid.push(vec![rad * theta.cos(), rad * theta.sin()]);
        }
    }
    grid
}

pub fn tolerant_checks(
    records: &[TrialRecord],
    eps: f64,
    target: f64,
    separable: bool,
) -> Vec<Check> {
    let pass_fraction =
        records.iter().filter(|r| r.excess <= eps).count() as f64 / records.len() as f64;
    let mut checks = vec![Check::at_least("pass_fraction_excess_le_eps", pass_fraction, target)];
    if separable {
        let max_risk = records.iter().map(|r| r.pop_risk).fold(0.0f64, f64::max);
        checks.push(Check::at_most("max_small_grid_risk_separable", max_risk, 0.0));
    }
    checks
}

pub fn run_tolerant(cfg: &TolerantConfig) -> Result<ExperimentReport> {
    if !(cfg.r > 0.0) || cfg.rings == 0 || cfg.angular == 0 || cfg.directions == 0 {
        return Err(Error::Invalid("need r > 0 and non-empty grids".into()));
    }
    if cfg.trials == 0 || !(cfg.eps > 0.0) || !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(Error::Invalid("need trials >= 1 and eps, delta in (0, 1)".into()));
    }
    let big_grid = translation_grid(3.0 * cfg.r, cfg.rings, cfg.angular);
    let small_grid: Vec<Vec<f64>> = if cfg.collapse_small_grid {
        big_grid.clone()
    } else {
        big_grid
            .iter()
            .filter(|d| cfg.p.norm(d) <= cfg.r * (1.0 + 1e-12))
            .cloned()
            .collect()
    };
    if small_grid.is_empty() {
        return Err(Error::Invalid("small grid is empty; increase rings".into()));
    }
    let adv_big = Adversary::uniform_translations(big_grid.clone())?;
    let adv_small = Adversary::uniform_translations(small_grid.clone())?;

    // Complexity term: greedy r-cover of the big-grid points within 2r of
    // the small grid.
    let inflated: Vec<Vec<f64>> = big_grid
        .iter()
        .filter(|d| {
            small_grid
                .iter()
                .any(|s| cfg.p.distance(d, s) <= 2.0 * cfg.r * (1.0 + 1e-12))
        })
        .cloned()
        .collect();
    let (cover_size, _) =
        covering_number_greedy(&MetricSpaceSample::new(inflated, cfg.p)?, cfg.r)?;

    let class = HypothesisClass::halfspace_grid(2, cfg.directions, cfg.class_seed)?;
    let planted = match class.member(0) {
        crate::domain::Hypothesis::Halfspace { w } => w,
        _ => unreachable!(),
    };

    // Support: points with margin above 3r (+slack) along the planted
    // direction, spread along the orthogonal, labels then flipped with
    // probability `label_noise`.
    use rand::Rng;
    let mut rng = seeding::rng_from(seeding::derive(cfg.seed, "tolerant-data", 0));
    let orth = [-planted[1], planted[0]];
    let support: Vec<LabeledExample> = (0..cfg.support_points)
        .map(|_| {
            let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let t = side * (3.0 * cfg.r + cfg.margin_slack + rng.random_range(0.0..1.0));
            let s = rng.random_range(-2.0..2.0);
            let x: Vec<f64> = (0..2).map(|i| t * planted[i] + s * orth[i]).collect();
            let mut y = Label::from_sign_of(t);
            if rng.random::<f64>() < cfg.label_noise {
                y = y.flipped();
            }
            LabeledExample::new(Instance::Vector(x), y)
        })
        .collect();
    let distribution = Distribution::uniform(&support)?;
    let Distribution::FiniteSupport { support: weighted } = &distribution else {
        unreachable!()
    };

    let table_big = Arc::new(RiskTable::build(&LossSpec::WorstCase, &class, &adv_big, weighted)?);
    let table_small = Arc::new(RiskTable::build(&LossSpec::WorstCase, &class, &adv_small, weighted)?);
    let benchmark = (0..table_big.class_len())
        .map(|h| table_big.pop_risk(h))
        .fold(f64::INFINITY, f64::min);

    let points: Vec<Instance> = support.iter().map(|ex| ex.x.clone()).collect();
    let vc = super::vc_estimate(&class, &points, 3) as f64;
    let n0 = cfg.n_override.unwrap_or_else(|| {
        super::bound_n(vc * super::ln_at_least_one(cover_size as f64), cfg.delta, cfg.eps)
    });
    let target = super::pass_fraction_target(cfg.delta, cfg.trials);
    let separable = cfg.label_noise == 0.0;

    let run_at = |n: usize| -> Result<Vec<TrialRecord>> {
        Ok((0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let trial_seed = seeding::derive(cfg.seed, "tolerant", t as u64);
                let sample = distribution
                    .sample_indices(n, seeding::derive(trial_seed, "sample", 0))
                    .expect("finite support");
                let (idx, emp) = table_big.erm(&sample, TieBreak::LowestIndex, trial_seed);
                let pop_small = table_small.pop_risk(idx as usize);
                TrialRecord {
                    trial: t as u64,
                    seed: trial_seed,
                    n,
                    emp_risk: emp,
                    pop_risk: pop_small,
                    benchmark,
                    excess: pop_small - benchmark,
                }
            })
            .collect())
    };
    let outcome = super::run_with_doubling(n0, cfg.n_cap, cfg.max_doublings, run_at, |records| {
        tolerant_checks(records, cfg.eps, target, separable)
            .iter()
            .all(|c| c.pass)
    })?;
    let checks = tolerant_checks(&outcome.records, cfg.eps, target, separable);

    let mut config = serde_json::to_value(cfg).expect("config serializes");
    config["attempted_sizes"] = serde_json::to_value(&outcome.attempted).expect("sizes");
    config["cover_complexity_term"] = serde_json::to_value(cover_size).expect("cover");
    config["big_grid_size"] = serde_json::to_value(big_grid.len()).expect("grid");
    config["small_grid_size"] = serde_json::to_value(small_grid.len()).expect("grid");
    let aggregates = Aggregates::from_records(&outcome.records, Some(cfg.eps));
    Ok(ExperimentReport::new(
        config,
        outcome.records,
        aggregates,
        Verdict::from_checks(
            "R_{G'}(worst-case ERM over G) <= inf_h R_G(h) + eps with prob >= 1 - delta at \
             n = (VC ln(N_r(G'_{2r})) + ln(1/delta))/eps^2, constants 1",
            Some(outcome.n_star),
            checks,
        ),
    ))
}
