use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constructions::ConstructionGeometry;
use crate::error::{Error, Result};

use super::{Instance, Label};

/// A classifier. Halfspaces and sine-sign classifiers act on vector
/// instances; tables and construction hypotheses act on abstract points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Hypothesis {
    /// sign(<w, x>) with the convention sign(0) = +1.
    Halfspace { w: Vec<f64> },
    /// A finite lookup table with a default label for unmapped points; the
    /// map serializes as `[point, label]` pairs.
    Table {
        #[serde(with = "label_pairs")]
        map: BTreeMap<u64, Label>,
        default: Label,
    },
    /// sign(sin(omega * x)) on one-dimensional instances, with
    /// sign(sin(0)) = +1.
    SineSign { omega: f64 },
    /// A bitstring-parameterized member of a lower-bound construction class.
    Construction {
        part: usize,
        bits: u32,
        geometry: Arc<ConstructionGeometry>,
    },
}

mod label_pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::domain::Label;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<u64, Label>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        map.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<u64, Label>, D::Error> {
        let pairs = Vec::<(u64, Label)>::deserialize(d)?;
        Ok(pairs.into_iter().collect())
    }
}

impl Hypothesis {
    pub fn halfspace(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() || w.iter().all(|c| *c == 0.0) {
            return Err(Error::Invalid("halfspace weight vector must be nonzero".into()));
        }
        Ok(Hypothesis::Halfspace { w })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Hypothesis::Halfspace { w } => {
                if w.is_empty() || w.iter().all(|c| *c == 0.0) {
                    Err(Error::Invalid("halfspace weight vector must be nonzero".into()))
                } else {
                    Ok(())
                }
            }
            Hypothesis::Table { .. } | Hypothesis::SineSign { .. } => Ok(()),
            Hypothesis::Construction { part, bits, geometry } => {
                geometry.validate_hypothesis(*part, *bits)
            }
        }
    }

    /// Evaluates the classifier on an instance. Deterministic; errors on a
    /// domain-kind mismatch.
    pub fn evaluate(&self, x: &Instance) -> Result<Label> {
        match self {
            Hypothesis::Halfspace { w } => {
                let v = x.as_vector()?;
                if v.len() != w.len() {
                    return Err(Error::DomainMismatch(format!(
                        "halfspace of dimension {} applied to a vector of dimension {}",
                        w.len(),
                        v.len()
                    )));
                }
                let dot: f64 = w.iter().zip(v).map(|(a, b)| a * b).sum();
                Ok(Label::from_sign_of(dot))
            }
            Hypothesis::Table { map, default } => {
                let p = x.as_point()?;
                Ok(map.get(&p).copied().unwrap_or(*default))
            }
            Hypothesis::SineSign { omega } => {
                let v = x.as_vector()?;
                if v.len() != 1 {
                    return Err(Error::DomainMismatch(format!(
                        "sine-sign classifier needs a one-dimensional instance, got dimension {}",
                        v.len()
                    )));
                }
                let s = (omega * v[0]).sin();
                // sign(sin(0)) = +1; covers both +0.0 and -0.0.
                if s == 0.0 {
                    Ok(Label::PLUS)
                } else {
                    Ok(Label::from_sign_of(s))
                }
            }
            Hypothesis::Construction { part, bits, geometry } => {
                let p = x.as_point()?;
                Ok(geometry.evaluate(*part, *bits, p))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfspace_sign_convention() {
        let h = Hypothesis::halfspace(vec![1.0, 0.0]).unwrap();
        let plus = h.evaluate(&Instance::Vector(vec![2.0, 0.0])).unwrap();
        assert_eq!(plus, Label::PLUS);
        // Boundary point: sign(0) = +1.
        let boundary = h.evaluate(&Instance::Vector(vec![0.0, 5.0])).unwrap();
        assert_eq!(boundary, Label::PLUS);
        let minus = h.evaluate(&Instance::Vector(vec![-1.0, 0.0])).unwrap();
        assert_eq!(minus, Label::MINUS);
    }

    #[test]
    fn zero_halfspace_rejected() {
        assert!(Hypothesis::halfspace(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn sine_sign_zero_convention() {
        let h = Hypothesis::SineSign { omega: 0.0 };
        assert_eq!(h.evaluate(&Instance::Vector(vec![4.2])).unwrap(), Label::PLUS);
        let h5 = Hypothesis::SineSign { omega: 5.0 };
        assert_eq!(h5.evaluate(&Instance::Vector(vec![0.0])).unwrap(), Label::PLUS);
    }

    #[test]
    fn sine_sign_is_odd_off_zeros() {
        let h = Hypothesis::SineSign { omega: 1.3 };
        for x in [0.1, 0.7, 2.5, -3.1, 10.0] {
            let s = (1.3 * x as f64).sin();
            if s != 0.0 {
                let a = h.evaluate(&Instance::Vector(vec![x])).unwrap();
                let b = h.evaluate(&Instance::Vector(vec![-x])).unwrap();
                assert_eq!(a, b.flipped());
            }
        }
    }

    #[test]
    fn table_default_for_unmapped() {
        let h = Hypothesis::Table {
            map: BTreeMap::from([(3, Label::PLUS)]),
            default: Label::MINUS,
        };
        assert_eq!(h.evaluate(&Instance::Point(3)).unwrap(), Label::PLUS);
        assert_eq!(h.evaluate(&Instance::Point(99)).unwrap(), Label::MINUS);
    }

    #[test]
    fn domain_mismatch_is_typed() {
        let h = Hypothesis::halfspace(vec![1.0]).unwrap();
        assert!(matches!(
            h.evaluate(&Instance::Point(0)),
            Err(Error::DomainMismatch(_))
        ));
        let t = Hypothesis::Table {
            map: BTreeMap::new(),
            default: Label::PLUS,
        };
        assert!(matches!(
            t.evaluate(&Instance::Vector(vec![1.0])),
            Err(Error::DomainMismatch(_))
        ));
    }
}
