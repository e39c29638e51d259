use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::{DomainKind, Instance};

/// Order of an l_p norm: 1, 2, infinity, or a general real p >= 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormOrder {
    One,
    Two,
    Inf,
    General(f64),
}

impl NormOrder {
    pub fn from_value(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(NormOrder::One)
        } else if p == 2.0 {
            Ok(NormOrder::Two)
        } else if p.is_infinite() && p > 0.0 {
            Ok(NormOrder::Inf)
        } else if p > 1.0 && p.is_finite() {
            Ok(NormOrder::General(p))
        } else {
            Err(Error::Invalid(format!("norm order must be >= 1, got {p}")))
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            NormOrder::One => 1.0,
            NormOrder::Two => 2.0,
            NormOrder::Inf => f64::INFINITY,
            NormOrder::General(p) => *p,
        }
    }

    /// The dual exponent q with 1/p + 1/q = 1.
    pub fn dual(&self) -> NormOrder {
        match self {
            NormOrder::One => NormOrder::Inf,
            NormOrder::Two => NormOrder::Two,
            NormOrder::Inf => NormOrder::One,
            NormOrder::General(p) => NormOrder::General(p / (p - 1.0)),
        }
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        match self {
            NormOrder::One => v.iter().map(|c| c.abs()).sum(),
            NormOrder::Two => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            NormOrder::Inf => v.iter().map(|c| c.abs()).fold(0.0, f64::max),
            NormOrder::General(p) => v.iter().map(|c| c.abs().powf(*p)).sum::<f64>().powf(1.0 / p),
        }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.norm(&diff)
    }
}

impl Serialize for NormOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormOrder::Inf => s.serialize_str("inf"),
            other => s.serialize_f64(other.value()),
        }
    }
}

impl<'de> Deserialize<'de> for NormOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(p) => NormOrder::from_value(p).map_err(serde::de::Error::custom),
            Repr::Text(t) if t == "inf" => Ok(NormOrder::Inf),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("bad norm order `{t}`"))),
        }
    }
}

/// One perturbation in a finite adversary: either a translation of vector
/// instances or an explicit image table over abstract points. Image tables
/// serialize as `[point, image]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Perturbation {
    Translation {
        translation: Vec<f64>,
    },
    Images {
        #[serde(with = "image_pairs")]
        images: BTreeMap<u64, u64>,
    },
}

mod image_pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<u64, u64>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        map.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<u64, u64>, D::Error> {
        let pairs = Vec::<(u64, u64)>::deserialize(d)?;
        Ok(pairs.into_iter().collect())
    }
}

impl Perturbation {
    pub fn apply(&self, x: &Instance) -> Result<Instance> {
        match (self, x) {
            (Perturbation::Translation { translation }, Instance::Vector(v)) => {
                if translation.len() != v.len() {
                    return Err(Error::DomainMismatch(format!(
                        "translation of dimension {} applied to a vector of dimension {}",
                        translation.len(),
                        v.len()
                    )));
                }
                Ok(Instance::Vector(
                    v.iter().zip(translation).map(|(a, b)| a + b).collect(),
                ))
            }
            (Perturbation::Images { images }, Instance::Point(p)) => images
                .get(p)
                .map(|q| Instance::Point(*q))
                .ok_or_else(|| {
                    Error::DomainMismatch(format!("atom image table has no entry for point {p}"))
                }),
            (Perturbation::Translation { .. }, Instance::Point(_)) => Err(Error::DomainMismatch(
                "translation atom applied to an abstract point".into(),
            )),
            (Perturbation::Images { .. }, Instance::Vector(_)) => Err(Error::DomainMismatch(
                "image-table atom applied to a vector instance".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(flatten)]
    pub perturbation: Perturbation,
    pub weight: Rational,
}

/// A finite weighted perturbation set. Weights are positive exact rationals
/// summing to exactly 1; the common denominator is cached so that mistake
/// probabilities accumulate as integer numerators.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteAtoms {
    atoms: Vec<Atom>,
    lcm: i64,
    scaled: Vec<i64>,
}

impl FiniteAtoms {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Invalid("finite adversary needs at least one atom".into()));
        }
        let mut lcm: i64 = 1;
        let mut total = Rational::zero();
        for atom in &atoms {
            if !atom.weight.is_positive() {
                return Err(Error::Invalid(format!(
                    "atom weight {} is not positive",
                    atom.weight
                )));
            }
            lcm = checked_lcm(lcm, atom.weight.denom())?;
            total = total + atom.weight;
        }
        if total != Rational::one() {
            return Err(Error::Invalid(format!(
                "atom weights sum to {total}, expected exactly 1"
            )));
        }
        let scaled = atoms
            .iter()
            .map(|a| a.weight.numer() * (lcm / a.weight.denom()))
            .collect();
        Ok(FiniteAtoms { atoms, lcm, scaled })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Common denominator of all atom weights.
    pub fn common_denominator(&self) -> i64 {
        self.lcm
    }

    /// Weight of atom `i` scaled by the common denominator (an integer).
    pub fn scaled_weight(&self, i: usize) -> i64 {
        self.scaled[i]
    }
}

impl Serialize for FiniteAtoms {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.atoms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteAtoms {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let atoms = Vec::<Atom>::deserialize(d)?;
        FiniteAtoms::new(atoms).map_err(serde::de::Error::custom)
    }
}

fn checked_lcm(a: i64, b: i64) -> Result<i64> {
    let g = a.gcd(&b);
    (a / g)
        .checked_mul(b)
        .ok_or_else(|| Error::Invalid("atom weight denominators are too fine to combine".into()))
}

/// Translations drawn uniformly from an l_p ball of radius gamma, estimated
/// by Monte Carlo with `n_mc` draws per margin evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpBallSpec {
    pub p: NormOrder,
    pub gamma: f64,
    pub n_mc: usize,
    pub base_seed: u64,
}

impl LpBallSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(Error::Invalid(format!("ball radius must be positive, got {}", self.gamma)));
        }
        if self.n_mc == 0 {
            return Err(Error::Invalid("n_mc must be at least 1".into()));
        }
        Ok(())
    }
}

/// A perturbation model: a finite weighted atom set (exact) or uniform
/// translations from an l_p ball (Monte Carlo).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Adversary {
    FiniteAtoms { atoms: FiniteAtoms },
    LpBall(LpBallSpec),
}

impl Adversary {
    pub fn finite(atoms: Vec<Atom>) -> Result<Self> {
        Ok(Adversary::FiniteAtoms {
            atoms: FiniteAtoms::new(atoms)?,
        })
    }

    pub fn lp_ball(p: NormOrder, gamma: f64, n_mc: usize, base_seed: u64) -> Result<Self> {
        let spec = LpBallSpec { p, gamma, n_mc, base_seed };
        spec.validate()?;
        Ok(Adversary::LpBall(spec))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Adversary::FiniteAtoms { atoms } => FiniteAtoms::new(atoms.atoms().to_vec()).map(|_| ()),
            Adversary::LpBall(spec) => spec.validate(),
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteAtoms> {
        match self {
            Adversary::FiniteAtoms { atoms } => Some(atoms),
            Adversary::LpBall(_) => None,
        }
    }

    /// Uniform atoms over a list of translations.
    pub fn uniform_translations(translations: Vec<Vec<f64>>) -> Result<Self> {
        let n = translations.len();
        if n == 0 {
            return Err(Error::Invalid("need at least one translation".into()));
        }
        let w = Rational::new(1, n as i64)?;
        Adversary::finite(
            translations
                .into_iter()
                .map(|t| Atom {
                    perturbation: Perturbation::Translation { translation: t },
                    weight: w,
                })
                .collect(),
        )
    }

    /// Domain kind this adversary perturbs, if determined by its atoms.
    pub fn kind(&self) -> Option<DomainKind> {
        match self {
            Adversary::FiniteAtoms { atoms } => match &atoms.atoms()[0].perturbation {
                Perturbation::Translation { translation } => {
                    Some(DomainKind::Vector(translation.len()))
                }
                Perturbation::Images { .. } => Some(DomainKind::Abstract),
            },
            Adversary::LpBall(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_must_sum_to_one() {
        let mk = |num, den| Atom {
            perturbation: Perturbation::Translation { translation: vec![0.0] },
            weight: Rational::new(num, den).unwrap(),
        };
        assert!(FiniteAtoms::new(vec![mk(1, 2), mk(1, 2)]).is_ok());
        assert!(FiniteAtoms::new(vec![mk(1, 2), mk(1, 3)]).is_err());
        assert!(FiniteAtoms::new(vec![mk(3, 2), mk(-1, 2)]).is_err());
    }

    #[test]
    fn scaled_weights_use_common_denominator() {
        let mk = |num, den| Atom {
            perturbation: Perturbation::Translation { translation: vec![0.0] },
            weight: Rational::new(num, den).unwrap(),
        };
        let atoms = FiniteAtoms::new(vec![mk(1, 4), mk(1, 4), mk(1, 2)]).unwrap();
        assert_eq!(atoms.common_denominator(), 4);
        assert_eq!(
            (0..3).map(|i| atoms.scaled_weight(i)).collect::<Vec<_>>(),
            vec![1, 1, 2]
        );
    }

    #[test]
    fn dual_exponents() {
        assert_eq!(NormOrder::One.dual(), NormOrder::Inf);
        assert_eq!(NormOrder::Inf.dual(), NormOrder::One);
        assert_eq!(NormOrder::Two.dual(), NormOrder::Two);
        let q = NormOrder::General(3.0).dual();
        assert!((q.value() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn norm_order_serde() {
        assert_eq!(serde_json::to_string(&NormOrder::Inf).unwrap(), r#""inf""#);
        let p: NormOrder = serde_json::from_str("2.0").unwrap();
        assert_eq!(p, NormOrder::Two);
        let g: NormOrder = serde_json::from_str("3.5").unwrap();
        assert_eq!(g, NormOrder::General(3.5));
        assert!(serde_json::from_str::<NormOrder>("0.5").is_err());
    }

    #[test]
    fn perturbation_domain_checks() {
        let t = Perturbation::Translation { translation: vec![1.0, 0.0] };
        assert!(t.apply(&Instance::Point(0)).is_err());
        let shifted = t.apply(&Instance::Vector(vec![1.0, 2.0])).unwrap();
        assert_eq!(shifted, Instance::Vector(vec![2.0, 2.0]));
        let im = Perturbation::Images { images: BTreeMap::from([(1, 10)]) };
        assert_eq!(im.apply(&Instance::Point(1)).unwrap(), Instance::Point(10));
        assert!(im.apply(&Instance::Point(2)).is_err());
    }
}
