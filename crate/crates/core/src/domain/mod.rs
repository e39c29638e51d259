//! Shared domain types: instances, labels, examples, datasets, and
//! distributions.
//!
//! All types are immutable after construction and safe to share across
//! parallel workers.

mod adversary;
mod hypothesis;
mod margin;
mod sampler;

pub use adversary::{Adversary, Atom, FiniteAtoms, LpBallSpec, NormOrder, Perturbation};
pub use hypothesis::Hypothesis;
pub use margin::{prob_mistake, prob_mistake_rational, smoothed_margin, smoothed_margin_rational};
pub use sampler::sample_lp_ball;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::seeding;

/// A point of the instance domain: either a real vector of fixed dimension or
/// an abstract point identifier in a finite domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Instance {
    Point(u64),
    Vector(Vec<f64>),
}

impl Instance {
    pub fn kind(&self) -> DomainKind {
        match self {
            Instance::Vector(v) => DomainKind::Vector(v.len()),
            Instance::Point(_) => DomainKind::Abstract,
        }
    }

    pub fn as_vector(&self) -> Result<&[f64]> {
        match self {
            Instance::Vector(v) => Ok(v),
            Instance::Point(_) => Err(Error::DomainMismatch(
                "expected a vector instance, got an abstract point".into(),
            )),
        }
    }

    pub fn as_point(&self) -> Result<u64> {
        match self {
            Instance::Point(p) => Ok(*p),
            Instance::Vector(_) => Err(Error::DomainMismatch(
                "expected an abstract point, got a vector instance".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    Vector(usize),
    Abstract,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::Vector(d) => write!(f, "vector[{d}]"),
            DomainKind::Abstract => write!(f, "abstract"),
        }
    }
}

/// A label in {-1, +1}.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Label(i8);

impl Label {
    pub const PLUS: Label = Label(1);
    pub const MINUS: Label = Label(-1);

    pub fn new(v: i64) -> Result<Label> {
        match v {
            1 => Ok(Label::PLUS),
            -1 => Ok(Label::MINUS),
            other => Err(Error::Invalid(format!("label must be -1 or +1, got {other}"))),
        }
    }

    /// +1.0 or -1.0.
    pub fn value(&self) -> f64 {
        f64::from(self.0)
    }

    pub fn sign(&self) -> i64 {
        i64::from(self.0)
    }

    pub fn flipped(&self) -> Label {
        Label(-self.0)
    }

    /// Sign convention used throughout: sign(0) = +1.
    pub fn from_sign_of(v: f64) -> Label {
        if v < 0.0 {
            Label::MINUS
        } else {
            Label::PLUS
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.0)
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.0)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Label::new(v).map_err(serde::de::Error::custom)
    }
}

/// A labeled example: an instance plus a label in {-1, +1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub x: Instance,
    pub y: Label,
}

impl LabeledExample {
    pub fn new(x: Instance, y: Label) -> Self {
        LabeledExample { x, y }
    }

    pub fn vector(coords: &[f64], y: Label) -> Self {
        LabeledExample::new(Instance::Vector(coords.to_vec()), y)
    }

    pub fn point(id: u64, y: Label) -> Self {
        LabeledExample::new(Instance::Point(id), y)
    }
}

/// A non-empty sequence of labeled examples sharing one domain kind.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Dataset(Vec<LabeledExample>);

impl Dataset {
    pub fn new(examples: Vec<LabeledExample>) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let kind = examples[0].x.kind();
        for (i, ex) in examples.iter().enumerate() {
            if ex.x.kind() != kind {
                return Err(Error::DomainMismatch(format!(
                    "example {i} has domain kind {}, dataset starts with {kind}",
                    ex.x.kind()
                )));
            }
        }
        Ok(Dataset(examples))
    }

    pub fn kind(&self) -> DomainKind {
        self.0[0].x.kind()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LabeledExample> {
        self.0.iter()
    }
}

impl<'de> Deserialize<'de> for Dataset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let examples = Vec::<LabeledExample>::deserialize(d)?;
        Dataset::new(examples).map_err(serde::de::Error::custom)
    }
}

/// A distribution over labeled examples: finite weighted support (exact) or a
/// seeded synthetic generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Distribution {
    FiniteSupport { support: Vec<(LabeledExample, Rational)> },
    Synthetic(SyntheticSpec),
}

/// Synthetic generators are pure functions of (parameters, seed).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum SyntheticSpec {
    /// Points uniform in a centered cube of side 2*spread, labeled by the
    /// sign of <w, x>, with labels flipped independently with probability
    /// `flip_prob`. Population risks are estimated from `pop_samples` draws.
    /// Draws are pure functions of (parameters, base_seed, caller seed).
    PlantedHalfspace {
        w: Vec<f64>,
        spread: f64,
        flip_prob: f64,
        pop_samples: usize,
        base_seed: u64,
    },
}

impl Distribution {
    pub fn finite(support: Vec<(LabeledExample, Rational)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let kind = support[0].0.x.kind();
        let mut total = Rational::zero();
        for (ex, w) in &support {
            if ex.x.kind() != kind {
                return Err(Error::DomainMismatch(
                    "finite support mixes domain kinds".into(),
                ));
            }
            if !w.is_positive() {
                return Err(Error::Invalid(format!("support weight {w} is not positive")));
            }
            total = total + *w;
        }
        if total != Rational::one() {
            return Err(Error::Invalid(format!(
                "support weights sum to {total}, expected exactly 1"
            )));
        }
        Ok(Distribution::FiniteSupport { support })
    }

    /// Uniform distribution over the given examples.
    pub fn uniform(examples: &[LabeledExample]) -> Result<Self> {
        let n = examples.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let w = Rational::new(1, n as i64)?;
        Distribution::finite(examples.iter().map(|e| (e.clone(), w)).collect())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Distribution::FiniteSupport { support } => {
                Distribution::finite(support.clone()).map(|_| ())
            }
            Distribution::Synthetic(SyntheticSpec::PlantedHalfspace {
                w,
                spread,
                flip_prob,
                pop_samples,
                ..
            }) => {
                if w.iter().all(|c| *c == 0.0) {
                    return Err(Error::Invalid("planted halfspace weight vector is zero".into()));
                }
                if !(*spread > 0.0) {
                    return Err(Error::Invalid("spread must be positive".into()));
                }
                if !(0.0..=1.0).contains(flip_prob) {
                    return Err(Error::Invalid("flip_prob must lie in [0, 1]".into()));
                }
                if *pop_samples == 0 {
                    return Err(Error::Invalid("pop_samples must be at least 1".into()));
                }
                Ok(())
            }
        }
    }

    /// Draws an i.i.d. sample of size `n`, deterministic given the seed
    /// (combined with the generator's base seed for synthetic
    /// distributions).
    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut rng = match self {
            Distribution::Synthetic(spec) => {
                seeding::rng_from(seeding::combine(spec.base_seed(), seed))
            }
            Distribution::FiniteSupport { .. } => seeding::rng_from(seed),
        };
        match self {
            Distribution::FiniteSupport { support } => {
                let cdf: Vec<f64> = {
                    let mut acc = 0.0;
                    support
                        .iter()
                        .map(|(_, w)| {
                            acc += w.to_f64();
                            acc
                        })
                        .collect()
                };
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    let u: f64 = rand::Rng::random(&mut rng);
                    let idx = cdf.partition_point(|c| *c <= u).min(support.len() - 1);
                    out.push(support[idx].0.clone());
                }
                Dataset::new(out)
            }
            Distribution::Synthetic(spec) => {
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    out.push(spec.draw(&mut rng));
                }
                Dataset::new(out)
            }
        }
    }

    /// Index of each support entry drawn, for finite-support distributions.
    /// Sampling `n` indices here and resolving them against the support is
    /// identical to [`Distribution::sample`] with the same seed.
    pub fn sample_indices(&self, n: usize, seed: u64) -> Result<Vec<usize>> {
        let Distribution::FiniteSupport { support } = self else {
            return Err(Error::Invalid(
                "index sampling requires a finite-support distribution".into(),
            ));
        };
        let mut rng = seeding::rng_from(seed);
        let cdf: Vec<f64> = {
            let mut acc = 0.0;
            support
                .iter()
                .map(|(_, w)| {
                    acc += w.to_f64();
                    acc
                })
                .collect()
        };
        Ok((0..n)
            .map(|_| {
                let u: f64 = rand::Rng::random(&mut rng);
                cdf.partition_point(|c| *c <= u).min(support.len() - 1)
            })
            .collect())
    }
}

impl SyntheticSpec {
    fn draw(&self, rng: &mut rand_chacha::ChaCha8Rng) -> LabeledExample {
        match self {
            SyntheticSpec::PlantedHalfspace {
                w,
                spread,
                flip_prob,
                ..
            } => {
                use rand::Rng;
                let x: Vec<f64> = (0..w.len())
                    .map(|_| rng.random_range(-*spread..=*spread))
                    .collect();
                let dot: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
                let mut y = Label::from_sign_of(dot);
                if rng.random::<f64>() < *flip_prob {
                    y = y.flipped();
                }
                LabeledExample::new(Instance::Vector(x), y)
            }
        }
    }

    pub fn pop_samples(&self) -> usize {
        match self {
            SyntheticSpec::PlantedHalfspace { pop_samples, .. } => *pop_samples,
        }
    }

    pub fn base_seed(&self) -> u64 {
        match self {
            SyntheticSpec::PlantedHalfspace { base_seed, .. } => *base_seed,
        }
    }
}
