//! Complexity estimators: brute-force VC dimension, loss-class VC, empirical
//! Rademacher complexity, covering numbers, and the nice-perturbation check
//! for halfspaces.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::domain::{sample_lp_ball, Adversary, Instance, LabeledExample, NormOrder};
use crate::error::{Error, Result};
use crate::learners::HypothesisClass;
use crate::losses::{self, LossSpec};
use crate::seeding;

const MAX_SHATTER_POINTS: usize = 20;
const MAX_EXACT_RADEMACHER: usize = 12;
const MAX_EXACT_COVER: usize = 20;

/// Behavior rows: one bit vector per hypothesis, over a fixed point list.
fn behavior_rows(class: &HypothesisClass, points: &[Instance], budget: u64) -> Result<Vec<Vec<bool>>> {
    let needed = class.len().saturating_mul(points.len() as u64);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    (0..class.len())
        .map(|i| {
            let h = class.member(i);
            points
                .iter()
                .map(|x| h.evaluate(x).map(|l| l == crate::domain::Label::PLUS))
                .collect()
        })
        .collect()
}

fn subset_shattered(rows: &[Vec<bool>], subset: &[usize]) -> bool {
    let full = 1u32 << subset.len();
    let mut seen = HashSet::with_capacity(full as usize);
    for row in rows {
        let mut mask = 0u32;
        for (bit, idx) in subset.iter().enumerate() {
            if row[*idx] {
                mask |= 1 << bit;
            }
        }
        seen.insert(mask);
        if seen.len() as u32 == full {
            return true;
        }
    }
    false
}

/// Iterates k-subsets of 0..n in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if visit(&idx) {
            return;
        }
        // Advance the odometer.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn count_combinations(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u64::MAX,
        };
    }
    acc
}

/// True iff the class realizes all 2^|points| sign patterns on the points.
pub fn shatter_check(class: &HypothesisClass, points: &[Instance], budget: u64) -> Result<bool> {
    if points.is_empty() || points.len() > MAX_SHATTER_POINTS {
        return Err(Error::Invalid(format!(
            "shattering checks take 1..={MAX_SHATTER_POINTS} points, got {}",
            points.len()
        )));
    }
    let rows = behavior_rows(class, points, budget)?;
    let all: Vec<usize> = (0..points.len()).collect();
    Ok(subset_shattered(&rows, &all))
}

fn vc_of_rows(rows: &[Vec<bool>], n_points: usize, cap: usize, budget: u64) -> Result<usize> {
    let cap = cap.min(n_points).min(MAX_SHATTER_POINTS);
    let mut best = 0;
    for k in 1..=cap {
        let work = count_combinations(n_points as u64, k as u64)
            .saturating_mul(rows.len() as u64);
        if work > budget {
            return Err(Error::BudgetExceeded { needed: work, budget });
        }
        let mut found = false;
        for_each_combination(n_points, k, |subset| {
            if subset_shattered(rows, subset) {
                found = true;
                return true;
            }
            false
        });
        if !found {
            // No k-subset is shattered, so no larger subset can be.
            return Ok(best);
        }
        best = k;
    }
    Ok(best)
}

/// Largest k <= cap such that some k-subset of the domain points is
/// shattered, by exhaustive subset scan with early termination.
pub fn vc_dimension(
    class: &HypothesisClass,
    domain_points: &[Instance],
    cap: usize,
    budget: u64,
) -> Result<usize> {
    if domain_points.is_empty() {
        return Err(Error::Invalid("vc dimension needs at least one domain point".into()));
    }
    let rows = behavior_rows(class, domain_points, budget)?;
    vc_of_rows(&rows, domain_points.len(), cap, budget)
}

/// The {0,1} loss behaviors of every class member on the example list.
pub fn loss_behaviors(
    spec: &LossSpec,
    class: &HypothesisClass,
    adv: &Adversary,
    examples: &[LabeledExample],
    budget: u64,
) -> Result<Vec<Vec<bool>>> {
    if !spec.is_binary() {
        return Err(Error::NonBinaryLoss(spec.name().into()));
    }
    let atoms = adv.as_finite().ok_or(Error::WorstCaseNeedsAtoms)?;
    let needed = class
        .len()
        .saturating_mul(examples.len() as u64)
        .saturating_mul(atoms.len() as u64);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    (0..class.len())
        .map(|i| {
            let h = class.member(i);
            examples
                .iter()
                .map(|ex|

                    losses::pointwise_loss_rational(spec, &h, atoms, ex)
                        .map(|l| l == crate::rational::Rational::one()))
                .collect()
        })
        .collect()
}

/// True iff the induced binary loss class realizes all 2^|examples| loss
/// behaviors on the example list.
pub fn loss_shatter_check(
    spec: &LossSpec,
    class: &HypothesisClass,
    adv: &Adversary,
    examples: &[LabeledExample],
    budget: u64,
) -> Result<bool> {
    if examples.is_empty() || examples.len() > MAX_SHATTER_POINTS {
        return Err(Error::Invalid(format!(
            "shattering checks take 1..={MAX_SHATTER_POINTS} examples, got {}",
            examples.len()
        )));
    }
    let rows = loss_behaviors(spec, class, adv, examples, budget)?;
    let all: Vec<usize> = (0..examples.len()).collect();
    Ok(subset_shattered(&rows, &all))
}

/// VC dimension of the induced binary loss class on the example list.
pub fn loss_class_vc(
    spec: &LossSpec,
    class: &HypothesisClass,
    adv: &Adversary,
    examples: &[LabeledExample],
    cap: usize,
    budget: u64,
) -> Result<usize> {
    if examples.is_empty() {
        return Err(Error::Invalid("loss-class vc needs at least one example".into()));
    }
    let rows = loss_behaviors(spec, class, adv, examples, budget)?;
    vc_of_rows(&rows, examples.len(), cap, budget)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RademacherMode {
    /// Full enumeration of all 2^n sign patterns (n <= 12).
    Exact,
    /// Monte Carlo over sign vectors.
    MonteCarlo { draws: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RademacherEstimate {
    pub value: f64,
    /// Standard error of the Monte Carlo mean; absent in exact mode.
    pub std_error: Option<f64>,
}

/// Empirical Rademacher complexity of an evaluated function matrix:
/// E_sigma[ sup_f (1/n) sum_i sigma_i f_i ] for `values[f][i]` in [-1, 1].
pub fn empirical_rademacher(values: &[Vec<f64>], mode: RademacherMode) -> Result<RademacherEstimate> {
    if values.is_empty() || values[0].is_empty() {
        return Err(Error::Invalid("rademacher needs a non-empty value matrix".into()));
    }
    let n = values[0].len();
    if values.iter().any(|row| row.len() != n) {
        return Err(Error::Invalid("rademacher value matrix has ragged rows".into()));
    }
    let sup_for_signs = |sign_at: &dyn Fn(usize) -> f64| -> f64 {
        values
            .iter()
            .map(|row| {
                let mut s = 0.0;
                for (i, v) in row.iter().enumerate() {
                    s += sign_at(i) * v;
                }
                s / n as f64
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    match mode {
        RademacherMode::Exact => {
            if n > MAX_EXACT_RADEMACHER {
                return Err(Error::ExactModeTooLarge { n, max: MAX_EXACT_RADEMACHER });
            }
            let patterns = 1u64 << n;
            let mut total = 0.0;
            for mask in 0..patterns {
                total += sup_for_signs(&|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 });
            }
            Ok(RademacherEstimate {
                value: total / patterns as f64,
                std_error: None,
            })
        }
        RademacherMode::MonteCarlo { draws, seed } => {
            if draws == 0 {
                return Err(Error::Invalid("monte carlo mode needs draws >= 1".into()));
            }
            use rand::Rng;
            let mut rng = seeding::rng_from(seed);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            let mut signs = vec![1.0f64; n];
            for _ in 0..draws {
                for s in &mut signs {
                    *s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                }
                let v = sup_for_signs(&|i| signs[i]);
                sum += v;
                sum_sq += v * v;
            }
            let mean = sum / draws as f64;
            let var = (sum_sq / draws as f64 - mean * mean).max(0.0);
            Ok(RademacherEstimate {
                value: mean,
                std_error: Some((var / draws as f64).sqrt()),
            })
        }
    }
}

/// A finite sample of a translation metric space: elements are translation
/// vectors and the sup-over-x distance between translations reduces to
/// ||d1 - d2||_p.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricSpaceSample {
    pub elements: Vec<Vec<f64>>,
    pub p: NormOrder,
}

impl MetricSpaceSample {
    pub fn new(elements: Vec<Vec<f64>>, p: NormOrder) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Invalid("metric space sample must be non-empty".into()));
        }
        let dim = elements[0].len();
        if elements.iter().any(|e| e.len() != dim) {
            return Err(Error::Invalid("metric space elements have mixed dimensions".into()));
        }
        Ok(MetricSpaceSample { elements, p })
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.p.distance(&self.elements[i], &self.elements[j])
    }
}

/// Greedy r-cover with centers drawn from the element list: scans elements
/// in index order and opens a new center whenever the current element is
/// uncovered. Returns (size, center indices); always a valid cover, an upper
/// bound on the minimum.
pub fn covering_number_greedy(space: &MetricSpaceSample, r: f64) -> Result<(usize, Vec<usize>)> {
    if !(r > 0.0) {
        return Err(Error::Invalid(format!("cover radius must be positive, got {r}")));
    }
    let mut centers: Vec<usize> = Vec::new();
    for i in 0..space.elements.len() {
        if !centers.iter().any(|c| space.distance(*c, i) <= r) {
            centers.push(i);
        }
    }
    Ok((centers.len(), centers))
}

/// Exact minimum r-cover (centers from the element list) for up to 20
/// elements, by dynamic programming over covered subsets.
pub fn covering_number_exact(space: &MetricSpaceSample, r: f64) -> Result<(usize, Vec<usize>)> {
    if !(r > 0.0) {
        return Err(Error::Invalid(format!("cover radius must be positive, got {r}")));
    }
    let n = space.elements.len();
    if n > MAX_EXACT_COVER {
        return Err(Error::Invalid(format!(
            "exact cover supports at most {MAX_EXACT_COVER} elements, got {n}"
        )));
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let cover_mask: Vec<u32> = (0..n)
        .map(|c| {
            let mut m = 0u32;
            for i in 0..n {
                if space.distance(c, i) <= r {
                    m |= 1 << i;
                }
            }
            m
        })
        .collect();
    let size = full as usize + 1;
    let mut dp = vec![u8::MAX; size];
    let mut from = vec![(0u32, usize::MAX); size];
    dp[0] = 0;
    for mask in 0..size {
        if dp[mask] == u8::MAX {
            continue;
        }
        for (c, cm) in cover_mask.iter().enumerate() {
            let next = (mask as u32 | cm) as usize;
            if dp[next] > dp[mask] + 1 {
                dp[next] = dp[mask] + 1;
                from[next] = (mask as u32, c);
            }
        }
    }
    let mut centers = Vec::new();
    let mut cur = full as usize;
    while cur != 0 {
        let (prev, c) = from[cur];
        centers.push(c);
        cur = prev as usize;
    }
    centers.sort_unstable();
    Ok((dp[full as usize] as usize, centers))
}

/// Outcome of the nice-perturbation check for halfspaces.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RNiceReport {
    pub triples: usize,
    /// Triples with |<w, x + tau>| below the degeneracy threshold, excluded
    /// from pass/fail statistics rather than silently counted.
    pub excluded_degenerate: usize,
    pub passed: usize,
    pub pass_fraction: f64,
    pub failures: Vec<RNiceFailure>,
    /// The witness direction is normalized in the dual norm; for p != 2 the
    /// dual exponent q = p/(p-1) replaces p in the pairing bound.
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RNiceFailure {
    pub triple: usize,
    pub kappa: Vec<f64>,
    pub margin_at_center: f64,
}

const DEGENERACY_EPS: f64 = 1e-9;
const MAX_RECORDED_FAILURES: usize = 100;

/// The direction w* with ||w*||_p = 1 and <w, w*> = ||w||_q (q dual to p).
fn dual_witness_direction(w: &[f64], p: &NormOrder) -> Vec<f64> {
    match p {
        NormOrder::Two => {
            let nrm = NormOrder::Two.norm(w);
            w.iter().map(|c| c / nrm).collect()
        }
        NormOrder::One => {
            let (j, _) = w
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .expect("nonzero vector");
            let mut out = vec![0.0; w.len()];
            out[j] = w[j].signum();
            out
        }
        NormOrder::Inf => w.iter().map(|c| if *c == 0.0 { 0.0 } else { c.signum() }).collect(),
        NormOrder::General(pv) => {
            let q = pv / (pv - 1.0);
            let raw: Vec<f64> = w.iter().map(|c| c.signum() * c.abs().powf(q - 1.0)).collect();
            let nrm = p.norm(&raw);
            raw.iter().map(|c| c / nrm).collect()
        }
    }
}

/// Sampled (w, x, tau) lists for the nice-perturbation check.
pub type NiceTriples = (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>);

/// Random (w, x, tau) triples for the nice-perturbation check: Gaussian
/// directions, cube-uniform points, and ball-uniform shifts.
pub fn random_nice_triples(
    dim: usize,
    p: &NormOrder,
    r: f64,
    triples: usize,
    seed: u64,
) -> NiceTriples {
    use rand::Rng;
    use rand_distr::{Distribution as _, StandardNormal};
    let mut rng = seeding::rng_from(seeding::derive(seed, "rnice-samples", 0));
    let mut ws = Vec::with_capacity(triples);
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(triples);
    let mut taus = Vec::with_capacity(triples);
    for _ in 0..triples {
        let w: Vec<f64> = loop {
            let cand: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            if cand.iter().any(|c| *c != 0.0) {
                break cand;
            }
        };
        ws.push(w);
        xs.push((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect());
        taus.push(sample_lp_ball(p, r, dim, &mut rng));
    }
    (ws, xs, taus)
}

/// For each sampled (w, x, tau) with ||tau||_p <= r, builds the witness
/// center g* translated by tau + c * r * w* (c the sign of the margin at
/// x + tau, w* the dual-norm witness direction), then samples `trials`
/// perturbations kappa with ||kappa||_p <= r and reports the fraction of
/// triples for which every sampled kappa preserves the label.
pub fn r_nice_check(
    ws: &[Vec<f64>],
    xs: &[Vec<f64>],
    taus: &[Vec<f64>],
    p: &NormOrder,
    r: f64,
    trials: usize,
    seed: u64,
) -> Result<RNiceReport> {
    if ws.len() != xs.len() || ws.len() != taus.len() || ws.is_empty() {
        return Err(Error::Invalid("need equal, non-empty w/x/tau sample lists".into()));
    }
    if !(r > 0.0) || trials == 0 {
        return Err(Error::Invalid("need r > 0 and trials >= 1".into()));
    }
    for (i, tau) in taus.iter().enumerate() {
        if p.norm(tau) > r * (1.0 + 1e-12) {
            return Err(Error::Invalid(format!("tau {i} lies outside the radius-r ball")));
        }
    }
    let mut excluded = 0usize;
    let mut passed = 0usize;
    let mut failures = Vec::new();
    for (i, ((w, x), tau)) in ws.iter().zip(xs).zip(taus).enumerate() {
        if w.iter().all(|c| *c == 0.0) {
            return Err(Error::Invalid(format!("w {i} is the zero vector")));
        }
        let dim = w.len();
        if x.len() != dim || tau.len() != dim {
            return Err(Error::DomainMismatch(format!("triple {i} mixes dimensions")));
        }
        let margin0: f64 = w.iter().zip(x.iter().zip(tau)).map(|(wc, (xc, tc))| wc * (xc + tc)).sum();
        if margin0.abs() < DEGENERACY_EPS {
            excluded += 1;
            continue;
        }
        let c = margin0.signum();
        let witness = dual_witness_direction(w, p);
        let center: Vec<f64> = x
            .iter()
            .zip(tau.iter().zip(&witness))
            .map(|(xc, (tc, wc))| xc + tc + c * r * wc)
            .collect();
        let mut rng = seeding::rng_from(seeding::derive(seed, "rnice", i as u64));
        let mut ok = true;
        for _ in 0..trials {
            let kappa = sample_lp_ball(p, r, dim, &mut rng);
            let margin: f64 = w
                .iter()
                .zip(center.iter().zip(&kappa))
                .map(|(wc, (cc, kc))| wc * (cc + kc))
                .sum();
            let label = if margin < 0.0 { -1.0 } else { 1.0 };
            if label != c {
                ok = false;
                if failures.len() < MAX_RECORDED_FAILURES {
                    failures.push(RNiceFailure {
                        triple: i,
                        kappa,
                        margin_at_center: margin,
                    });
                }
                break;
            }
        }
        if ok {
            passed += 1;
        }
    }
    let eligible = ws.len() - excluded;
    Ok(RNiceReport {
        triples: ws.len(),
        excluded_degenerate: excluded,
        passed,
        pass_fraction: if eligible == 0 { 1.0 } else { passed as f64 / eligible as f64 },
        failures,
        note: "witness center shifted along the dual-norm direction; for p != 2 the dual \
               exponent q = p/(p-1) replaces p in the pairing bound"
            .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Hypothesis, Label};
    use crate::learners::HypothesisClass;
    use std::collections::BTreeMap;

    fn table_class(tables: &[(&[(u64, Label)], Label)]) -> HypothesisClass {
        HypothesisClass::explicit(
            tables
                .iter()
                .map(|(entries, default)| Hypothesis::Table {
                    map: BTreeMap::from_iter(entries.iter().copied()),
                    default: *default,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_pair_shatters_single_point() {
        let class = table_class(&[(&[], Label::PLUS), (&[], Label::MINUS)]);
        let pts = [Instance::Point(0)];
        assert!(shatter_check(&class, &pts, 1 << 20).unwrap());
        let singleton = table_class(&[(&[], Label::PLUS)]);
        assert!(!shatter_check(&singleton, &pts, 1 << 20).unwrap());
    }

    #[test]
    fn full_labeling_class_has_vc_k() {
        // All 8 labelings of 3 points.
        let mut members = Vec::new();
        for mask in 0..8u64 {
            let entries: Vec<(u64, Label)> = (0..3)
                .map(|i| (i, if mask >> i & 1 == 1 { Label::PLUS } else { Label::MINUS }))
                .collect();
            members.push(Hypothesis::Table {
                map: BTreeMap::from_iter(entries),
                default: Label::MINUS,
            });
        }
        let class = HypothesisClass::explicit(members).unwrap();
        let pts: Vec<Instance> = (0..3).map(Instance::Point).collect();
        assert_eq!(vc_dimension(&class, &pts, 5, 1 << 24).unwrap(), 3);
    }

    #[test]
    fn threshold_tables_on_collinear_points_have_vc_one() {
        // Tables mimicking thresholds over 5 ordered points.
        let mut members = Vec::new();
        for cut in 0..=5u64 {
            let entries: Vec<(u64, Label)> = (0..5)
                .map(|i| (i, if i >= cut { Label::PLUS } else { Label::MINUS }))
                .collect();
            members.push(Hypothesis::Table {
                map: BTreeMap::from_iter(entries),
                default: Label::MINUS,
            });
        }
        let class = HypothesisClass::explicit(members).unwrap();
        let pts: Vec<Instance> = (0..5).map(Instance::Point).collect();
        assert_eq!(vc_dimension(&class, &pts, 5, 1 << 24).unwrap(), 1);
    }

    #[test]
    fn singleton_loss_class_has_vc_zero() {
        use crate::domain::{Adversary, Atom, LabeledExample, Perturbation};
        use crate::losses::LossSpec;
        use crate::rational::Rational;
        let class = table_class(&[(&[], Label::PLUS)]);
        let adv = Adversary::finite(vec![Atom {
            perturbation: Perturbation::Images { images: BTreeMap::from([(0, 1), (5, 6)]) },
            weight: Rational::one(),
        }])
        .unwrap();
        let examples = vec![
            LabeledExample::point(0, Label::PLUS),
            LabeledExample::point(5, Label::MINUS),
        ];
        let spec = LossSpec::rho_threshold(Rational::zero()).unwrap();
        assert_eq!(loss_class_vc(&spec, &class, &adv, &examples, 2, 1 << 20).unwrap(), 0);
    }

    #[test]
    fn rademacher_exact_trivial_cases() {
        // One constant function: E[sup] = E[mean of signs] = 0.
        let constant = vec![vec![1.0; 8]];
        let est = empirical_rademacher(&constant, RademacherMode::Exact).unwrap();
        assert!(est.value.abs() < 1e-15);

        // All sign patterns realized: sup matches sigma exactly, value 1.
        let n = 4;
        let all: Vec<Vec<f64>> = (0..1u64 << n)
            .map(|mask| {
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                    .collect()
            })
            .collect();
        let est = empirical_rademacher(&all, RademacherMode::Exact).unwrap();
        assert!((est.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rademacher_exact_cap() {
        let wide = vec![vec![0.5; 13]];
        assert!(matches!(
            empirical_rademacher(&wide, RademacherMode::Exact),
            Err(Error::ExactModeTooLarge { .. })
        ));
    }

    #[test]
    fn greedy_cover_examples() {
        let one = MetricSpaceSample::new(vec![vec![0.0]], NormOrder::Two).unwrap();
        assert_eq!(covering_number_greedy(&one, 0.5).unwrap().0, 1);

        let two = MetricSpaceSample::new(vec![vec![0.0], vec![1.5]], NormOrder::Two).unwrap();
        assert_eq!(covering_number_greedy(&two, 0.5).unwrap().0, 2);

        let grid = MetricSpaceSample::new(
            vec![vec![0.0], vec![0.5], vec![1.0], vec![1.5], vec![2.0]],
            NormOrder::Two,
        )
        .unwrap();
        let (greedy, centers) = covering_number_greedy(&grid, 0.5).unwrap();
        assert!(greedy <= 3);
        for i in 0..5 {
            assert!(centers.iter().any(|c| grid.distance(*c, i) <= 0.5));
        }
        let (exact, exact_centers) = covering_number_exact(&grid, 0.5).unwrap();
        assert_eq!(exact, 2);
        for i in 0..5 {
            assert!(exact_centers.iter().any(|c| grid.distance(*c, i) <= 0.5));
        }
        assert!(exact <= greedy);
    }

    #[test]
    fn rnice_boundary_triples_are_excluded() {
        let w = vec![vec![1.0, 0.0, 0.0]];
        let x = vec![vec![0.0, 0.0, 0.0]]; // exactly on the boundary
        let tau = vec![vec![0.0, 0.0, 0.0]];
        let rep = r_nice_check(&w, &x, &tau, &NormOrder::Two, 0.2, 50, 1).unwrap();
        assert_eq!(rep.excluded_degenerate, 1);
        assert_eq!(rep.pass_fraction, 1.0);
    }

    #[test]
    fn rnice_far_point_trivially_preserved() {
        let w = vec![vec![0.5, -1.0, 0.25]];
        let x = vec![vec![3.0, -3.0, 1.0]]; // margin far beyond 3r * ||w||_2
        let tau = vec![vec![0.0, 0.0, 0.0]];
        let rep = r_nice_check(&w, &x, &tau, &NormOrder::Two, 0.2, 200, 2).unwrap();
        assert_eq!(rep.passed, 1);
        assert!(rep.failures.is_empty());
    }
}
