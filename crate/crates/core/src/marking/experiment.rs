use super::adversary::{Adversary, AdversaryKind};
use super::predicates::{marking_violation_fraction, CoalitionView};
use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::fpcode::{gen, trace, CodeParams};
use crate::seed::SeedKey;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub accused: Option<usize>,
    pub violation_fraction: f64,
    pub in_f_beta: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecurityStats {
    pub trials: usize,
    /// Trials with `c ∈ F_β(C_S)` and no accusation.
    pub completeness_failures: usize,
    /// Trials accusing a user outside the coalition.
    pub false_accusations: usize,
    pub marking_violation_fractions: Vec<f64>,
    pub outcomes: Vec<TrialOutcome>,
}

/// The JSON summary of a security experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecuritySummary {
    pub trials: usize,
    pub completeness_failures: usize,
    pub false_accusations: usize,
    pub mean_violation_fraction: f64,
}

impl SecurityStats {
    pub fn completeness_failure_rate(&self) -> f64 {
        self.completeness_failures as f64 / self.trials as f64
    }

    pub fn false_accusation_rate(&self) -> f64 {
        self.false_accusations as f64 / self.trials as f64
    }

    pub fn summary(&self) -> SecuritySummary {
        let mean = self.marking_violation_fractions.iter().sum::<f64>() / self.trials as f64;
        SecuritySummary {
            trials: self.trials,
            completeness_failures: self.completeness_failures,
            false_accusations: self.false_accusations,
            mean_violation_fraction: mean,
        }
    }

    /// Per-trial CSV: `trial,accused,violation_fraction,in_F_beta`; an empty
    /// `accused` field means nobody was accused.
    pub fn trial_log_csv(&self) -> String {
        let mut out = String::from("trial,accused,violation_fraction,in_F_beta\n");
        for o in &self.outcomes {
            let accused = o.accused.map(|i| i.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", o.trial, accused, o.violation_fraction, o.in_f_beta);
        }
        out
    }
}

/// Runs `trials` independent rounds of generate → forge → trace.
///
/// Trial `t` derives every random choice from `key.index(t)`, so the result
/// does not depend on scheduling. The adversary only ever receives a
/// [`CoalitionView`].
pub fn run_security_experiment(
    params: &CodeParams,
    adversary: &AdversaryKind,
    coalition: &[usize],
    beta: f64,
    trials: usize,
    key: SeedKey,
) -> Result<SecurityStats> {
    if trials == 0 {
        return Err(invalid("security experiment needs at least one trial"));
    }
    if coalition.is_empty() {
        return Err(invalid("coalition must be nonempty"));
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(invalid(format!("beta must lie in [0, 1), got {beta}")));
    }
    let outcomes = exec::try_map_indexed(trials, |t| {
        let trial_key = key.index(t as u64);
        let (book, secret) = gen(params, trial_key.child("gen"));
        let view = CoalitionView::from_codebook(&book, coalition)?;
        let c = adversary.forge(&view, &mut trial_key.child("adversary").rng())?;
        let violation_fraction = marking_violation_fraction(&view, &c)?;
        let acc = trace(&book, &secret, &c, &mut trial_key.child("trace").rng())?;
        Ok::<_, Error>(TrialOutcome {
            trial: t,
            accused: acc.accused,
            violation_fraction,
            in_f_beta: violation_fraction <= beta,
        })
    })?;
    let completeness_failures = outcomes.iter().filter(|o| o.in_f_beta && o.accused.is_none()).count();
    let false_accusations = outcomes
        .iter()
        .filter(|o| o.accused.is_some_and(|i| !coalition.contains(&i)))
        .count();
    Ok(SecurityStats {
        trials,
        completeness_failures,
        false_accusations,
        marking_violation_fractions: outcomes.iter().map(|o| o.violation_fraction).collect(),
        outcomes,
    })
}
