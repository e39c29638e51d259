//! Uniform sampling from l_p balls.
//!
//! - p = 2: normalized Gaussian direction times radius * U^(1/d)
//! - p = inf: independent per-coordinate uniform
//! - p = 1: exponential magnitudes with random signs, normalized, times
//!   radius * U^(1/d)
//! - general p: generalized-Gaussian direction (|t|^p ~ Gamma(1/p), random
//!   sign), normalized, times radius * U^(1/d)
//!
//! Every returned draw satisfies ||delta||_p <= gamma; a final rescale guards
//! against rounding pushing the norm a few ulps past the radius.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use super::NormOrder;

pub fn sample_lp_ball(p: &NormOrder, gamma: f64, dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v = match p {
        NormOrder::Inf => {
            return (0..dim).map(|_| rng.random_range(-gamma..=gamma)).collect();
        }
        NormOrder::Two => {
            let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
            scale_to_radius(g, p, gamma, dim, rng)
        }
        NormOrder::One => {
            let g: Vec<f64> = (0..dim)
                .map(|_| {
                    let e: f64 = Exp1.sample(rng);
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    sign * e
                })
                .collect();
            scale_to_radius(g, p, gamma, dim, rng)
        }
        NormOrder::General(pv) => {
            let gamma_dist = Gamma::new(1.0 / pv, 1.0).expect("valid gamma shape");
            let g: Vec<f64> = (0..dim)
                .map(|_| {
                    let mag: f64 = gamma_dist.sample(rng);
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    sign * mag.powf(1.0 / pv)
                })
                .collect();
            scale_to_radius(g, p, gamma, dim, rng)
        }
    };
    let nrm = p.norm(&v);
    if nrm > gamma {
        let shrink = gamma / nrm;
        for c in &mut v {
            *c *= shrink;
        }
    }
    v
}

fn scale_to_radius(
    mut direction: Vec<f64>,
    p: &NormOrder,
    gamma: f64,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let nrm = p.norm(&direction);
    if nrm == 0.0 {
        return vec![0.0; dim];
    }
    let u: f64 = rng.random();
    let r = gamma * u.powf(1.0 / dim as f64);
    for c in &mut direction {
        *c *= r / nrm;
    }
    direction
}
