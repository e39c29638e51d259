//! Probabilistically robust losses, ERM-style proper learners, complexity
//! estimators, and lower-bound constructions for margin classifiers, with a
//! seeded experiment harness that turns each learnability statement into a
//! statistical pass/fail report.
//!
//! The building blocks:
//!
//! - [`domain`]: instances, labels, hypotheses, adversaries, and the
//!   smoothed-margin engine (exact rationals over finite atoms, seeded Monte
//!   Carlo over l_p balls).
//! - [`losses`]: worst-case, threshold, ramp, and Lipschitz-of-margin losses
//!   with pointwise, empirical, and population risk evaluation.
//! - [`learners`]: exhaustive ERM over enumerable classes, its worst-case
//!   and threshold instantiations, and the closed-form halfspace attack.
//! - [`complexity`]: brute-force VC dimension, loss-class VC, empirical
//!   Rademacher complexity, covering numbers, and the nice-perturbation
//!   check.
//! - [`constructions`]: the lower-bound geometry, its hard-distribution
//!   experiment, the sine-class margin, and the perturbation-model
//!   converter.
//! - [`experiments`]: seeded, reproducible experiment runners emitting JSON
//!   reports and CSV trial records.

// Validation guards use `!(x > 0.0)` so NaN parameters fail them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complexity;
pub mod constructions;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod learners;
pub mod losses;
pub mod rational;
pub mod seeding;

pub use domain::{
    Adversary, Atom, Dataset, Distribution, DomainKind, FiniteAtoms, Hypothesis, Instance, Label,
    LabeledExample, LpBallSpec, NormOrder, Perturbation, SyntheticSpec,
};
pub use error::{Error, Result};
pub use experiments::report::ExperimentReport;
pub use learners::{ErmOptions, ErmOutcome, HypothesisClass, TieBreak};
pub use losses::LossSpec;
pub use rational::Rational;
