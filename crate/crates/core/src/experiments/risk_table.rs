//! Memoized loss matrices over a finite support.
//!
//! Population risks in experiments are exact: finite-support distributions
//! paired with finite-atom adversaries. Pointwise losses over finite atoms
//! are seed-independent, so one (class x support) matrix serves every trial.
//! Empirical risks accumulate matrix entries in sample order, reproducing
//! the direct per-example computation bit for bit, and the argmin shares the
//! learner's tie-breaking, so table-based ERM returns the same index the
//! direct learner would.

use rayon::prelude::*;

use crate::domain::{Adversary, LabeledExample};
use crate::error::{Error, Result};
use crate::learners::{self, HypothesisClass, TieBreak};
use crate::losses::{self, LossSpec};
use crate::rational::Rational;

pub struct RiskTable {
    support: Vec<LabeledExample>,
    weights: Vec<Rational>,
    /// loss[h][i]: pointwise loss of class member h on support example i.
    loss: Vec<Vec<f64>>,
    /// Exact values for losses that are rational functions of the exact
    /// mistake probability.
    exact: Option<Vec<Vec<Rational>>>,
    /// {0,1}-valued loss: empirical risks reduce to exact mistake counts.
    binary: bool,
}

impl RiskTable {
    pub fn build(
        spec: &LossSpec,
        class: &HypothesisClass,
        adv: &Adversary,
        support: &[(LabeledExample, Rational)],
    ) -> Result<Self> {
        let atoms = adv.as_finite().ok_or(Error::WorstCaseNeedsAtoms)?;
        spec.validate()?;
        let class_len = class.len() as usize;
        if class_len == 0 || support.is_empty() {
            return Err(Error::Invalid("risk table needs a class and a support".into()));
        }
        if spec.is_rational_exact() {
            let exact: Vec<Vec<Rational>> = (0..class_len)
                .into_par_iter()
                .map(|h| {
                    let hyp = class.member(h as u64);
                    support
                        .iter()
                        .map(|(ex, _)| losses::pointwise_loss_rational(spec, &hyp, atoms, ex))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let loss = exact
                .iter()
                .map(|row| row.iter().map(Rational::to_f64).collect())
                .collect();
            Ok(RiskTable {
                support: support.iter().map(|(ex, _)| ex.clone()).collect(),
                weights: support.iter().map(|(_, w)| *w).collect(),
                loss,
                exact: Some(exact),
                binary: spec.is_binary(),
            })
        } else {
            let loss: Vec<Vec<f64>> = (0..class_len)
                .into_par_iter()
                .map(|h| {
                    let hyp = class.member(h as u64);
                    support
                        .iter()
                        .map(|(ex, _)| losses::pointwise_loss(spec, &hyp, adv, ex, 0))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RiskTable {
                support: support.iter().map(|(ex, _)| ex.clone()).collect(),
                weights: support.iter().map(|(_, w)| *w).collect(),
                loss,
                exact: None,
                binary: false,
            })
        }
    }

    pub fn class_len(&self) -> usize {
        self.loss.len()
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[LabeledExample] {
        &self.support
    }

    pub fn pointwise(&self, h: usize, i: usize) -> f64 {
        self.loss[h][i]
    }

    /// Exact population risk of member h over the weighted support.
    pub fn pop_risk(&self, h: usize) -> f64 {
        match &self.exact {
            Some(exact) => {
                let mut sum = Rational::zero();
                for (l, w) in exact[h].iter().zip(&self.weights) {
                    sum = sum + *l * *w;
                }
                sum.to_f64()
            }
            None => self.loss[h]
                .iter()
                .zip(&self.weights)
                .map(|(l, w)| l * w.to_f64())
                .sum(),
        }
    }

    /// (argmin index, minimum) of the exact population risk over the class.
    pub fn min_pop_risk(&self) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for h in 0..self.class_len() {
            let r = self.pop_risk(h);
            if r < best.1 {
                best = (h, r);
            }
        }
        best
    }

    /// Empirical risk of member h on a sample given by support indices,
    /// accumulated left to right in sample order.
    pub fn emp_risk(&self, h: usize, sample: &[usize]) -> f64 {
        let mut sum = 0.0;
        for i in sample {
            sum += self.loss[h][*i];
        }
        sum / sample.len() as f64
    }

    /// ERM over the table: identical outcome to running the direct learner
    /// on the resolved sample with the same tie policy and seed. For binary
    /// losses the per-member risk is an exact mistake count over the
    /// support, which equals the in-order sum bit for bit.
    pub fn erm(&self, sample: &[usize], tie: TieBreak, seed: u64) -> (u64, f64) {
        let risks: Vec<f64> = if self.binary {
            let mut counts = vec![0u64; self.support.len()];
            for i in sample {
                counts[*i] += 1;
            }
            let n = sample.len() as f64;
            (0..self.class_len())
                .map(|h| {
                    let bad: u64 = counts
                        .iter()
                        .zip(&self.loss[h])
                        .filter(|(_, l)| **l == 1.0)
                        .map(|(c, _)| *c)
                        .sum();
                    bad as f64 / n
                })
                .collect()
        } else {
            (0..self.class_len()).map(|h| self.emp_risk(h, sample)).collect()
        };
        learners::argmin_risks(&risks, tie, seed)
    }
}
