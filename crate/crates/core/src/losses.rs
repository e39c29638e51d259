//! Robust losses over the smoothed margin, evaluated pointwise and as
//! empirical / population risks.
//!
//! Writing t for the margin y * E_g[h(g(x))] and P = (1 - t) / 2 for the
//! mistake probability:
//!
//! - worst-case:      1 iff any atom image is mislabeled
//! - rho-threshold:   1{P > rho}, strict
//! - ramp(rho,rho*):  min(1, max(0, (P - rho*) / (rho - rho*)))
//! - hinge:           1 - t
//! - squared:         (1 - t)^2, range [0, 4]
//! - exponential:     exp(-t)
//! - average:         P
//! - scaled(rho):     min(P / rho, 1)
//!
//! On finite-atom adversaries P is an exact rational, so threshold
//! comparisons against rho are exact. On Monte Carlo adversaries the
//! indicator uses the float estimate with no fuzz band; estimates within
//! three standard errors of rho are statistically fragile and should not be
//! trusted as exact threshold decisions. The squared loss is reported
//! unnormalized with range [0, 4]; divide by 4 before feeding it into any
//! bounded-loss bound that assumes range [0, 1].

use serde::{Deserialize, Serialize};

use crate::domain::{
    prob_mistake, prob_mistake_rational, smoothed_margin, Adversary, Dataset, Distribution,
    FiniteAtoms, Hypothesis, LabeledExample,
};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::seeding;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossSpec {
    WorstCase,
    RhoThreshold { rho: Rational },
    Ramp { rho: Rational, rho_star: Rational },
    Hinge,
    Squared,
    Exponential,
    LinearAverage,
    ScaledRamp { rho: Rational },
}

impl LossSpec {
    pub fn rho_threshold(rho: Rational) -> Result<Self> {
        if rho < Rational::zero() || rho >= Rational::one() {
            return Err(Error::Invalid(format!("rho must lie in [0, 1), got {rho}")));
        }
        Ok(LossSpec::RhoThreshold { rho })
    }

    pub fn ramp(rho: Rational, rho_star: Rational) -> Result<Self> {
        if !(Rational::zero() <= rho_star && rho_star < rho && rho < Rational::one()) {
            return Err(Error::Invalid(format!(
                "ramp requires 0 <= rho* < rho < 1, got rho* = {rho_star}, rho = {rho}"
            )));
        }
        Ok(LossSpec::Ramp { rho, rho_star })
    }

    pub fn scaled_ramp(rho: Rational) -> Result<Self> {
        if !(Rational::zero() < rho && rho < Rational::one()) {
            return Err(Error::Invalid(format!("scaled ramp needs rho in (0, 1), got {rho}")));
        }
        Ok(LossSpec::ScaledRamp { rho })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LossSpec::RhoThreshold { rho } => LossSpec::rho_threshold(rho).map(|_| ()),
            LossSpec::Ramp { rho, rho_star } => LossSpec::ramp(rho, rho_star).map(|_| ()),
            LossSpec::ScaledRamp { rho } => LossSpec::scaled_ramp(rho).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LossSpec::WorstCase => "worst",
            LossSpec::RhoThreshold { .. } => "rho",
            LossSpec::Ramp { .. } => "ramp",
            LossSpec::Hinge => "hinge",
            LossSpec::Squared => "squared",
            LossSpec::Exponential => "exp",
            LossSpec::LinearAverage => "avg",
            LossSpec::ScaledRamp { .. } => "scaled",
        }
    }

    /// Flag grammar: `worst|rho:0.3|ramp:0.3,0.1|hinge|squared|exp|avg|scaled:0.3`.
    pub fn parse_flag(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        fn need<'a>(head: &str, a: Option<&'a str>) -> Result<&'a str> {
            a.ok_or_else(|| {
                Error::Invalid(format!("loss `{head}` needs a parameter, e.g. `{head}:0.3`"))
            })
        }
        match head {
            "worst" => Ok(LossSpec::WorstCase),
            "hinge" => Ok(LossSpec::Hinge),
            "squared" => Ok(LossSpec::Squared),
            "exp" => Ok(LossSpec::Exponential),
            "avg" => Ok(LossSpec::LinearAverage),
            "rho" => LossSpec::rho_threshold(Rational::parse(need(head, arg)?)?),
            "scaled" => LossSpec::scaled_ramp(Rational::parse(need(head, arg)?)?),
            "ramp" => {
                let arg = need(head, arg)?;
                let (a, b) = arg.split_once(',').ok_or_else(|| {
                    Error::Invalid("ramp takes two parameters, e.g. `ramp:0.3,0.1`".into())
                })?;
                LossSpec::ramp(Rational::parse(a)?, Rational::parse(b)?)
            }
            other => Err(Error::Invalid(format!("unknown loss `{other}`"))),
        }
    }

    /// Whether the loss takes only values in {0, 1}.
    pub fn is_binary(&self) -> bool {
        matches!(self, LossSpec::WorstCase | LossSpec::RhoThreshold { .. })
    }

    /// Whether the loss is an exact rational function of an exact mistake
    /// probability.
    pub fn is_rational_exact(&self) -> bool {
        !matches!(self, LossSpec::Hinge | LossSpec::Squared | LossSpec::Exponential)
    }
}

/// The loss as a function of the margin t in [-1, 1]. The worst-case loss is
/// not a function of the margin and is rejected.
pub fn margin_loss(spec: &LossSpec, t: f64) -> Result<f64> {
    let p = (1.0 - t) / 2.0;
    Ok(match *spec {
        LossSpec::WorstCase => {
            return Err(Error::Invalid(
                "the worst-case loss is not a function of the margin".into(),
            ))
        }
        LossSpec::RhoThreshold { rho } => f64::from(u8::from(p > rho.to_f64())),
        LossSpec::Ramp { rho, rho_star } => {
            ((p - rho_star.to_f64()) / (rho.to_f64() - rho_star.to_f64())).clamp(0.0, 1.0)
        }
        LossSpec::Hinge => 1.0 - t,
        LossSpec::Squared => (1.0 - t) * (1.0 - t),
        LossSpec::Exponential => (-t).exp(),
        LossSpec::LinearAverage => p,
        LossSpec::ScaledRamp { rho } => (p / rho.to_f64()).min(1.0),
    })
}

/// The Lipschitz constant of the loss as a function of the margin on
/// [-1, 1], or `None` for the non-Lipschitz threshold losses. The mistake
/// probability is an affine map of the margin with slope -1/2, which
/// contributes the factor 1/2 to the probability-side ramps.
pub fn lipschitz_constant(spec: &LossSpec) -> Option<f64> {
    match *spec {
        LossSpec::WorstCase | LossSpec::RhoThreshold { .. } => None,
        LossSpec::Ramp { rho, rho_star } => Some(0.5 / (rho - rho_star).to_f64()),
        LossSpec::Hinge => Some(1.0),
        LossSpec::Squared => Some(4.0),
        LossSpec::Exponential => Some(std::f64::consts::E),
        LossSpec::LinearAverage => Some(0.5),
        LossSpec::ScaledRamp { rho } => Some(0.5 / rho.to_f64()),
    }
}

/// Exact pointwise loss over a finite-atom adversary, for the losses that
/// are rational functions of the exact mistake probability. Every atom
/// weight is strictly positive, so the worst-case loss is the indicator of
/// P > 0.
pub fn pointwise_loss_rational(
    spec: &LossSpec,
    h: &Hypothesis,
    atoms: &FiniteAtoms,
    ex: &LabeledExample,
) -> Result<Rational> {
    let p = prob_mistake_rational(h, atoms, ex)?;
    loss_from_prob(spec, p)
}

fn loss_from_prob(spec: &LossSpec, p: Rational) -> Result<Rational> {
    Ok(match *spec {
        LossSpec::WorstCase => {
            if p > Rational::zero() {
                Rational::one()
            } else {
                Rational::zero()
            }
        }
        LossSpec::RhoThreshold { rho } => {
            if p > rho {
                Rational::one()
            } else {
                Rational::zero()
            }
        }
        LossSpec::Ramp { rho, rho_star } => ((p - rho_star) / (rho - rho_star)).clamp_unit(),
        LossSpec::LinearAverage => p,
        LossSpec::ScaledRamp { rho } => (p / rho).min(Rational::one()),
        LossSpec::Hinge | LossSpec::Squared | LossSpec::Exponential => {
            return Err(Error::Invalid(format!(
                "loss `{}` is not rational-exact",
                spec.name()
            )))
        }
    })
}

/// Pointwise loss of h on one example. Threshold comparisons run in exact
/// rationals whenever the adversary is finite.
pub fn pointwise_loss(
    spec: &LossSpec,
    h: &Hypothesis,
    adv: &Adversary,
    ex: &LabeledExample,
    seed: u64,
) -> Result<f64> {
    match adv {
        Adversary::FiniteAtoms { atoms } => {
            if spec.is_rational_exact() {
                Ok(pointwise_loss_rational(spec, h, atoms, ex)?.to_f64())
            } else {
                let t = smoothed_margin(h, adv, ex, seed)?;
                margin_loss(spec, t)
            }
        }
        Adversary::LpBall(_) => match spec {
            LossSpec::WorstCase => Err(Error::WorstCaseNeedsAtoms),
            LossSpec::LinearAverage => prob_mistake(h, adv, ex, seed),
            _ => {
                let t = smoothed_margin(h, adv, ex, seed)?;
                margin_loss(spec, t)
            }
        },
    }
}

/// Arithmetic mean of the pointwise loss over a dataset; the per-example
/// seed is `seed ^ index` and summation runs left to right.
pub fn empirical_risk(
    spec: &LossSpec,
    h: &Hypothesis,
    adv: &Adversary,
    dataset: &Dataset,
    seed: u64,
) -> Result<f64> {
    let mut sum = 0.0;
    for (i, ex) in dataset.iter().enumerate() {
        sum += pointwise_loss(spec, h, adv, ex, seed ^ i as u64)?;
    }
    Ok(sum / dataset.len() as f64)
}

/// Population risk: exact weighted sum over finite support, Monte Carlo mean
/// over the declared sample count for synthetic distributions.
pub fn population_risk(
    spec: &LossSpec,
    h: &Hypothesis,
    adv: &Adversary,
    dist: &Distribution,
    seed: u64,
) -> Result<f64> {
    match dist {
        Distribution::FiniteSupport { support } => {
            if let (Some(atoms), true) = (adv.as_finite(), spec.is_rational_exact()) {
                return Ok(population_risk_rational(spec, h, atoms, support)?.to_f64());
            }
            let mut sum = 0.0;
            for (i, (ex, w)) in support.iter().enumerate() {
                sum += w.to_f64() * pointwise_loss(spec, h, adv, ex, seed ^ i as u64)?;
            }
            Ok(sum)
        }
        Distribution::Synthetic(gen) => {
            let sample = dist.sample(gen.pop_samples(), seeding::derive(seed, "population", 0))?;
            empirical_risk(spec, h, adv, &sample, seed)
        }
    }
}

/// Exact population risk over finite support and finite atoms.
pub fn population_risk_rational(
    spec: &LossSpec,
    h: &Hypothesis,
    atoms: &FiniteAtoms,
    support: &[(LabeledExample, Rational)],
) -> Result<Rational> {
    let mut sum = Rational::zero();
    for (ex, w) in support {
        sum = sum + *w * pointwise_loss_rational(spec, h, atoms, ex)?;
    }
    Ok(sum)
}
