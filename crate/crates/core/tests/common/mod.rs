//! Shared test oracles: the lattice ball-grid attack for halfspaces and a
//! rejection sampler for instances bounded away from the decision boundary.

use probrobust_core::domain::NormOrder;
use probrobust_core::seeding;
use rand::Rng;
use rand_distr::{Distribution as _, StandardNormal};

/// A ball-grid attack oracle: lattice points of the cube filtered to the
/// ball, plus every lattice direction pushed to the sphere. Returns true iff
/// some grid perturbation flips the prediction away from the label (with the
/// sign(0) = +1 convention).
pub fn grid_attack_flips(w: &[f64], x: &[f64], y: f64, p: &NormOrder, gamma: f64, k: usize) -> bool {
    let dim = w.len();
    let base: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
    let mislabeled = |dot: f64| -> bool {
        let pred = if dot < 0.0 { -1.0 } else { 1.0 };
        pred != y
    };
    let step = 2.0 * gamma / (k - 1) as f64;
    let mut idx = vec![0usize; dim];
    loop {
        let delta: Vec<f64> = idx.iter().map(|i| -gamma + step * *i as f64).collect();
        let nrm = p.norm(&delta);
        let shift: f64 = w.iter().zip(&delta).map(|(a, b)| a * b).sum();
        if nrm <= gamma && mislabeled(base + shift) {
            return true;
        }
        // The same lattice direction, pushed onto the sphere.
        if nrm > 0.0 && mislabeled(base + shift * gamma / nrm) {
            return true;
        }
        // Odometer over the lattice.
        let mut axis = 0;
        loop {
            if axis == dim {
                return false;
            }
            idx[axis] += 1;
            if idx[axis] < k {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// Lattice resolution per axis for roughly `budget` interior points, odd so
/// axes and corners are exact lattice directions.
pub fn lattice_k(dim: usize, budget: usize) -> usize {
    let mut k = (budget as f64).powf(1.0 / dim as f64).floor() as usize;
    if k % 2 == 0 {
        k -= 1;
    }
    k.max(3)
}

/// Relative margin band the grid oracle cannot certify: the worst direction
/// error of the pushed lattice, with a 1.5x safety factor.
pub fn boundary_band(dim: usize, k: usize) -> f64 {
    let step_rel = 2.0 / (k - 1) as f64;
    let sin_theta = ((dim as f64).sqrt() * step_rel / 2.0).min(1.0);
    1.5 * (1.0 - (1.0 - sin_theta * sin_theta).sqrt()) + 1e-9
}

pub struct AttackInstance {
    pub w: Vec<f64>,
    pub x: Vec<f64>,
    pub y: f64,
    pub p: NormOrder,
    pub gamma: f64,
}

/// Random (w, x, y, gamma, p) instances with the closed-form margin bounded
/// away from the attack boundary by the oracle's resolution band.
pub fn sample_attack_instances(count: usize, budget: usize, seed: u64) -> Vec<(AttackInstance, usize)> {
    let mut rng = seeding::rng_from(seeding::derive(seed, "attack-instances", 0));
    let norms = [NormOrder::One, NormOrder::Two, NormOrder::Inf];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let dim = rng.random_range(2..=4usize);
        let k = lattice_k(dim, budget);
        let band = boundary_band(dim, k);
        let w: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        if w.iter().all(|c| *c == 0.0) {
            continue;
        }
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let gamma = rng.random_range(0.3..1.5);
        let y = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let p = norms[rng.random_range(0..norms.len())];
        let dual = p.dual().norm(&w);
        let signed: f64 = y * w.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
        // Boundary exclusion: the oracle's grid cannot certify instances
        // within its resolution of the flip boundary.
        if (signed - gamma * dual).abs() < band * gamma * dual {
            continue;
        }
        out.push((AttackInstance { w, x, y, p, gamma }, k));
    }
    out
}
