//! The smoothed-margin engine.
//!
//! The smoothed margin of h on (x, y) is y * E_g[h(g(x))] for g drawn from
//! the adversary's measure; the mistake probability P[h(g(x)) != y] equals
//! (1 - margin) / 2. Finite-atom adversaries are evaluated exactly in
//! rational arithmetic; ball adversaries are estimated by Monte Carlo, with
//! both quantities derived from the same draws so the affine identity holds
//! bit-exactly.

use crate::error::Result;
use crate::rational::Rational;
use crate::seeding;

use super::{sample_lp_ball, Adversary, FiniteAtoms, Hypothesis, Instance, LabeledExample};

/// y * E_g[h(g(x))], exact over finite atoms.
pub fn smoothed_margin_rational(
    h: &Hypothesis,
    atoms: &FiniteAtoms,
    ex: &LabeledExample,
) -> Result<Rational> {
    let den = atoms.common_denominator();
    let mut signed: i64 = 0;
    for (i, atom) in atoms.atoms().iter().enumerate() {
        let image = atom.perturbation.apply(&ex.x)?;
        let label = h.evaluate(&image)?;
        signed += label.sign() * atoms.scaled_weight(i);
    }
    Rational::new(ex.y.sign() * signed, den)
}

/// P[h(g(x)) != y] = (1 - margin) / 2, exact over finite atoms.
pub fn prob_mistake_rational(
    h: &Hypothesis,
    atoms: &FiniteAtoms,
    ex: &LabeledExample,
) -> Result<Rational> {
    let margin = smoothed_margin_rational(h, atoms, ex)?;
    Ok((Rational::one() - margin) * Rational::new(1, 2)?)
}

/// The smoothed margin in [-1, 1]. Finite atoms are exact (seed-independent);
/// ball adversaries average `n_mc` uniform draws, deterministic given
/// (base seed, seed).
pub fn smoothed_margin(
    h: &Hypothesis,
    adv: &Adversary,
    ex: &LabeledExample,
    seed: u64,
) -> Result<f64> {
    match adv {
        Adversary::FiniteAtoms { atoms } => Ok(smoothed_margin_rational(h, atoms, ex)?.to_f64()),
        Adversary::LpBall(spec) => {
            let x = ex.x.as_vector()?;
            let dim = x.len();
            let mut rng = seeding::rng_from(seeding::combine(spec.base_seed, seed));
            let mut sum = 0.0;
            let mut shifted = vec![0.0; dim];
            for _ in 0..spec.n_mc {
                let delta = sample_lp_ball(&spec.p, spec.gamma, dim, &mut rng);
                for (s, (a, b)) in shifted.iter_mut().zip(x.iter().zip(&delta)) {
                    *s = a + b;
                }
                let label = h.evaluate(&Instance::Vector(shifted.clone()))?;
                sum += ex.y.value() * label.value();
            }
            Ok((sum / spec.n_mc as f64).clamp(-1.0, 1.0))
        }
    }
}

/// P[h(g(x)) != y], derived from the same margin estimate (identical draws).
pub fn prob_mistake(h: &Hypothesis, adv: &Adversary, ex: &LabeledExample, seed: u64) -> Result<f64> {
    Ok((1.0 - smoothed_margin(h, adv, ex, seed)?) / 2.0)
}
