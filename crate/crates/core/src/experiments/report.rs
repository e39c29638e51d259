//! Experiment reports: per-trial records, aggregates, and pass/fail
//! verdicts. Records persist as CSV with fixed columns
//! `trial,seed,n,emp_risk,pop_risk,benchmark,excess`; verdicts are
//! recomputable from the persisted records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    pub emp_risk: f64,
    pub pop_risk: f64,
    pub benchmark: f64,
    pub excess: f64,
}

pub const TRIALS_CSV_HEADER: &str = "trial,seed,n,emp_risk,pop_risk,benchmark,excess";

pub fn trials_to_csv(records: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 48 + 64);
    out.push_str(TRIALS_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.trial, r.seed, r.n, r.emp_risk, r.pop_risk, r.benchmark, r.excess
        ));
    }
    out
}

pub fn trials_from_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == TRIALS_CSV_HEADER => {}
        other => {
            return Err(Error::Invalid(format!(
                "bad trials csv header: {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Invalid(format!("trials csv line {} malformed", lineno + 2)));
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Invalid(format!("bad float `{s}` in trials csv")))
        };
        records.push(TrialRecord {
            trial: fields[0]
                .parse()
                .map_err(|_| Error::Invalid(format!("bad trial index `{}`", fields[0])))?,
            seed: fields[1]
                .parse()
                .map_err(|_| Error::Invalid(format!("bad seed `{}`", fields[1])))?,
            n: fields[2]
                .parse()
                .map_err(|_| Error::Invalid(format!("bad n `{}`", fields[2])))?,
            emp_risk: parse_f(fields[3])?,
            pop_risk: parse_f(fields[4])?,
            benchmark: parse_f(fields[5])?,
            excess: parse_f(fields[6])?,
        });
    }
    Ok(records)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckDirection {
    AtLeast,
    AtMost,
    LessThan,
}

/// One named bound with the measured value, the threshold pinned by the
/// experiment, and the resulting pass flag.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub direction: CheckDirection,
    pub pass: bool,
}

impl Check {
    pub fn at_least(name: &str, value: f64, threshold: f64) -> Check {
        Check {
            name: name.into(),
            value,
            threshold,
            direction: CheckDirection::AtLeast,
            pass: value >= threshold,
        }
    }

    pub fn at_most(name: &str, value: f64, threshold: f64) -> Check {
        Check {
            name: name.into(),
            value,
            threshold,
            direction: CheckDirection::AtMost,
            pass: value <= threshold,
        }
    }

    pub fn less_than(name: &str, value: f64, threshold: f64) -> Check {
        Check {
            name: name.into(),
            value,
            threshold,
            direction: CheckDirection::LessThan,
            pass: value < threshold,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Aggregates {
    pub trials: u64,
    pub mean_emp_risk: f64,
    pub mean_pop_risk: f64,
    pub mean_excess: f64,
    pub median_excess: f64,
    pub excess_q10: f64,
    pub excess_q90: f64,
    /// Fraction of trials with excess <= eps, when an eps applies.
    pub pass_fraction: Option<f64>,
}

pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

impl Aggregates {
    pub fn from_records(records: &[TrialRecord], eps: Option<f64>) -> Aggregates {
        let n = records.len() as f64;
        let mut excesses: Vec<f64> = records.iter().map(|r| r.excess).collect();
        excesses.sort_by(f64::total_cmp);
        Aggregates {
            trials: records.len() as u64,
            mean_emp_risk: records.iter().map(|r| r.emp_risk).sum::<f64>() / n,
            mean_pop_risk: records.iter().map(|r| r.pop_risk).sum::<f64>() / n,
            mean_excess: records.iter().map(|r| r.excess).sum::<f64>() / n,
            median_excess: quantile(&excesses, 0.5),
            excess_q10: quantile(&excesses, 0.1),
            excess_q90: quantile(&excesses, 0.9),
            pass_fraction: eps.map(|e| {
                records.iter().filter(|r| r.excess <= e).count() as f64 / n
            }),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    /// The qualitative bound being tested; constants inside O(.) are set to
    /// 1 and the empirically sufficient sample size is reported as `n_star`.
    pub bound: String,
    pub n_star: Option<usize>,
    pub checks: Vec<Check>,
}

impl Verdict {
    pub fn from_checks(bound: &str, n_star: Option<usize>, checks: Vec<Check>) -> Verdict {
        Verdict {
            pass: checks.iter().all(|c| c.pass),
            bound: bound.into(),
            n_star,
            checks,
        }
    }
}

/// A complete experiment artifact: config echo, per-trial records,
/// aggregates, and the verdict. No timestamps, so identical configs and
/// seeds produce byte-identical serializations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: serde_json::Value,
    pub aggregates: Aggregates,
    pub verdict: Verdict,
    pub records: Vec<TrialRecord>,
}

impl ExperimentReport {
    pub fn new(
        config: serde_json::Value,
        records: Vec<TrialRecord>,
        aggregates: Aggregates,
        verdict: Verdict,
    ) -> ExperimentReport {
        ExperimentReport {
            config,
            aggregates,
            verdict,
            records,
        }
    }

    pub fn trials_csv(&self) -> String {
        trials_to_csv(&self.records)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// 0 when the verdict passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.verdict.pass)
    }
}
