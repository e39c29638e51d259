//! ERM-style proper learning rules over explicitly enumerable hypothesis
//! classes, plus the exact closed form for worst-case translation attacks on
//! halfspaces.
//!
//! Every learner returns a member of its input class, identified by index in
//! the class's declared order. Hypothesis evaluations may run in parallel;
//! the argmin reduction is performed in index order, so the winner never
//! depends on worker count.

use std::sync::Arc;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{ConstructionFilter, ConstructionGeometry};
use crate::domain::{
    Adversary, Dataset, DomainKind, Hypothesis, LabeledExample, NormOrder,
};
use crate::error::{Error, Result};
use crate::losses::{self, LossSpec};
use crate::rational::Rational;
use crate::seeding;

/// Default cap on hypothesis evaluations per learning call.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// An enumerable hypothesis class. Members are addressed by index in the
/// class's declared order.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum HypothesisClass {
    Explicit {
        members: Vec<Hypothesis>,
    },
    /// Unit-normalized candidate directions generated from a seed;
    /// duplicates after normalization are removed so argmin ties stay
    /// meaningful.
    HalfspaceGrid {
        dim: usize,
        count: usize,
        seed: u64,
        #[serde(skip)]
        cache: OnceLock<Vec<Vec<f64>>>,
    },
    SineGrid {
        omegas: Vec<f64>,
    },
    Construction {
        geometry: Arc<ConstructionGeometry>,
        filter: ConstructionFilter,
    },
}

impl Clone for HypothesisClass {
    fn clone(&self) -> Self {
        match self {
            HypothesisClass::Explicit { members } => HypothesisClass::Explicit {
                members: members.clone(),
            },
            HypothesisClass::HalfspaceGrid { dim, count, seed, .. } => {
                HypothesisClass::HalfspaceGrid {
                    dim: *dim,
                    count: *count,
                    seed: *seed,
                    cache: OnceLock::new(),
                }
            }
            HypothesisClass::SineGrid { omegas } => HypothesisClass::SineGrid {
                omegas: omegas.clone(),
            },
            HypothesisClass::Construction { geometry, filter } => HypothesisClass::Construction {
                geometry: Arc::clone(geometry),
                filter: *filter,
            },
        }
    }
}

impl PartialEq for HypothesisClass {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (HypothesisClass::Explicit { members: a }, HypothesisClass::Explicit { members: b }) => {
                a == b
            }
            (
                HypothesisClass::HalfspaceGrid { dim: d1, count: c1, seed: s1, .. },
                HypothesisClass::HalfspaceGrid { dim: d2, count: c2, seed: s2, .. },
            ) => d1 == d2 && c1 == c2 && s1 == s2,
            (HypothesisClass::SineGrid { omegas: a }, HypothesisClass::SineGrid { omegas: b }) => {
                a == b
            }
            (
                HypothesisClass::Construction { geometry: g1, filter: f1 },
                HypothesisClass::Construction { geometry: g2, filter: f2 },
            ) => g1 == g2 && f1 == f2,
            _ => false,
        }
    }
}

fn generate_halfspace_grid(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = seeding::rng_from(seed);
    let mut seen = std::collections::BTreeSet::new();
    let mut dirs = Vec::with_capacity(count);
    while dirs.len() < count {
        let raw: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let nrm = raw.iter().map(|c| c * c).sum::<f64>().sqrt();
        if nrm == 0.0 {
            continue;
        }
        let unit: Vec<f64> = raw.iter().map(|c| c / nrm).collect();
        let key: Vec<u64> = unit.iter().map(|c| c.to_bits()).collect();
        if seen.insert(key) {
            dirs.push(unit);
        }
    }
    dirs
}

impl HypothesisClass {
    pub fn explicit(members: Vec<Hypothesis>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Invalid("hypothesis class must be non-empty".into()));
        }
        let kind = hypothesis_kind(&members[0]);
        for h in &members {
            h.validate()?;
            if hypothesis_kind(h) != kind {
                return Err(Error::DomainMismatch(
                    "hypothesis class mixes domain kinds".into(),
                ));
            }
        }
        Ok(HypothesisClass::Explicit { members })
    }

    pub fn halfspace_grid(dim: usize, count: usize, seed: u64) -> Result<Self> {
        if dim == 0 || count == 0 {
            return Err(Error::Invalid("halfspace grid needs dim >= 1 and count >= 1".into()));
        }
        Ok(HypothesisClass::HalfspaceGrid {
            dim,
            count,
            seed,
            cache: OnceLock::new(),
        })
    }

    pub fn sine_grid(omegas: Vec<f64>) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::Invalid("sine grid must be non-empty".into()));
        }
        Ok(HypothesisClass::SineGrid { omegas })
    }

    fn grid_directions(&self) -> &[Vec<f64>] {
        match self {
            HypothesisClass::HalfspaceGrid { dim, count, seed, cache } => {
                cache.get_or_init(|| generate_halfspace_grid(*dim, *count, *seed))
            }
            _ => unreachable!("grid_directions on a non-grid class"),
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            HypothesisClass::Explicit { members } => members.len() as u64,
            HypothesisClass::HalfspaceGrid { .. } => self.grid_directions().len() as u64,
            HypothesisClass::SineGrid { omegas } => omegas.len() as u64,
            HypothesisClass::Construction { geometry, filter } => geometry.class_size(*filter),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `index`-th member in the class's declared order.
    pub fn member(&self, index: u64) -> Hypothesis {
        match self {
            HypothesisClass::Explicit { members } => members[index as usize].clone(),
            HypothesisClass::HalfspaceGrid { .. } => Hypothesis::Halfspace {
                w: self.grid_directions()[index as usize].clone(),
            },
            HypothesisClass::SineGrid { omegas } => Hypothesis::SineSign {
                omega: omegas[index as usize],
            },
            HypothesisClass::Construction { geometry, filter } => {
                let (part, bits) = geometry.member_bits(*filter, index);
                Hypothesis::Construction {
                    part,
                    bits,
                    geometry: Arc::clone(geometry),
                }
            }
        }
    }

    pub fn kind(&self) -> DomainKind {
        match self {
            HypothesisClass::Explicit { members } => hypothesis_kind(&members[0]),
            HypothesisClass::HalfspaceGrid { dim, .. } => DomainKind::Vector(*dim),
            HypothesisClass::SineGrid { .. } => DomainKind::Vector(1),
            HypothesisClass::Construction { .. } => DomainKind::Abstract,
        }
    }
}

pub fn hypothesis_kind(h: &Hypothesis) -> DomainKind {
    match h {
        Hypothesis::Halfspace { w } => DomainKind::Vector(w.len()),
        Hypothesis::Table { .. } | Hypothesis::Construction { .. } => DomainKind::Abstract,
        Hypothesis::SineSign { .. } => DomainKind::Vector(1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lowest index in the class's declared order (the default).
    LowestIndex,
    /// Uniformly at random from the minimizer set, derived from the seed.
    UniformRandom,
}

#[derive(Clone, Copy, Debug)]
pub struct ErmOptions {
    pub tie: TieBreak,
    pub budget: u64,
    pub seed: u64,
}

impl Default for ErmOptions {
    fn default() -> Self {
        ErmOptions {
            tie: TieBreak::LowestIndex,
            budget: DEFAULT_BUDGET,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ErmOutcome {
    pub index: u64,
    pub hypothesis: Hypothesis,
    pub empirical_risk: f64,
    pub evaluations: u64,
}

fn check_budget(class_len: u64, data_len: usize, budget: u64) -> Result<u64> {
    let needed = class_len.saturating_mul(data_len as u64);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(needed)
}

/// Picks the argmin over per-member risks computed by `risk_of`, breaking
/// ties by the configured policy.
pub fn argmin_risks(risks: &[f64], tie: TieBreak, seed: u64) -> (u64, f64) {
    let min = risks.iter().copied().fold(f64::INFINITY, f64::min);
    let winners: Vec<u64> = risks
        .iter()
        .enumerate()
        .filter(|(_, r)| **r == min)
        .map(|(i, _)| i as u64)
        .collect();
    let chosen = match tie {
        TieBreak::LowestIndex => winners[0],
        TieBreak::UniformRandom => {
            use rand::Rng;
            let mut rng = seeding::rng_from(seeding::derive(seed, "erm-tie", 0));
            winners[rng.random_range(0..winners.len())]
        }
    };
    (chosen, min)
}

fn erm_core<F>(class: &HypothesisClass, data_len: usize, opts: &ErmOptions, risk_of: F) -> Result<ErmOutcome>
where
    F: Fn(u64, &Hypothesis) -> Result<f64> + Sync,
{
    let len = class.len();
    let evaluations = check_budget(len, data_len, opts.budget)?;
    let risks: Vec<f64> = (0..len)
        .into_par_iter()
        .map(|i| risk_of(i, &class.member(i)))
        .collect::<Result<Vec<_>>>()?;
    let (index, risk) = argmin_risks(&risks, opts.tie, opts.seed);
    Ok(ErmOutcome {
        index,
        hypothesis: class.member(index),
        empirical_risk: risk,
        evaluations,
    })
}

/// Empirical risk minimization of the given loss over the class.
pub fn erm(
    spec: &LossSpec,
    class: &HypothesisClass,
    adv: &Adversary,
    data: &Dataset,
    opts: &ErmOptions,
) -> Result<ErmOutcome> {
    spec.validate()?;
    erm_core(class, data.len(), opts, |_, h| {
        losses::empirical_risk(spec, h, adv, data, opts.seed)
    })
}

/// Worst-case pointwise loss; ball adversaries fall back to the halfspace
/// closed form, anything else must be discretized first.
pub fn worst_case_pointwise(h: &Hypothesis, adv: &Adversary, ex: &LabeledExample) -> Result<f64> {
    match adv {
        Adversary::FiniteAtoms { .. } => losses::pointwise_loss(&LossSpec::WorstCase, h, adv, ex, 0),
        Adversary::LpBall(spec) => match h {
            Hypothesis::Halfspace { w } => halfspace_worst_loss(w, ex, &spec.p, spec.gamma),
            _ => Err(Error::WorstCaseNeedsAtoms),
        },
    }
}

fn worst_case_empirical(h: &Hypothesis, adv: &Adversary, data: &Dataset) -> Result<f64> {
    let mut sum = 0.0;
    for ex in data.iter() {
        sum += worst_case_pointwise(h, adv, ex)?;
    }
    Ok(sum / data.len() as f64)
}

/// Worst-case empirical risk minimization.
pub fn rerm(
    class: &HypothesisClass,
    adv: &Adversary,
    data: &Dataset,
    opts: &ErmOptions,
) -> Result<ErmOutcome> {
    erm_core(class, data.len(), opts, |_, h| worst_case_empirical(h, adv, data))
}

/// Threshold-loss empirical risk minimization at level rho.
pub fn prerm(
    rho: Rational,
    class: &HypothesisClass,
    adv: &Adversary,
    data: &Dataset,
    opts: &ErmOptions,
) -> Result<ErmOutcome> {
    let spec = LossSpec::rho_threshold(rho)?;
    erm(&spec, class, adv, data, opts)
}

/// Closed-form worst-case loss of a halfspace under l_p-ball translations of
/// radius gamma: the loss is 0 iff y * <w, x> > gamma * ||w||_q, where q is
/// the dual exponent with 1/p + 1/q = 1.
pub fn halfspace_worst_loss(
    w: &[f64],
    ex: &LabeledExample,
    p: &NormOrder,
    gamma: f64,
) -> Result<f64> {
    if w.is_empty() || w.iter().all(|c| *c == 0.0) {
        return Err(Error::Invalid("halfspace weight vector must be nonzero".into()));
    }
    if !(gamma > 0.0) {
        return Err(Error::Invalid(format!("ball radius must be positive, got {gamma}")));
    }
    let x = ex.x.as_vector()?;
    if x.len() != w.len() {
        return Err(Error::DomainMismatch(format!(
            "halfspace of dimension {} applied to a vector of dimension {}",
            w.len(),
            x.len()
        )));
    }
    let dot: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
    let dual_norm = p.dual().norm(w);
    Ok(if ex.y.value() * dot > gamma * dual_norm { 0.0 } else { 1.0 })
}
