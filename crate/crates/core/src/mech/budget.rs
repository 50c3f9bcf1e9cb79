use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// An `(ε, δ)` pair; `δ = 0` means pure DP.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    pub epsilon: f64,
    pub delta: f64,
}

impl PrivacyBudget {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0) || epsilon.is_nan() {
            return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(invalid(format!("delta must lie in [0, 1), got {delta}")));
        }
        Ok(PrivacyBudget { epsilon, delta })
    }

    pub fn pure(epsilon: f64) -> Result<Self> {
        PrivacyBudget::new(epsilon, 0.0)
    }

    pub fn is_pure(&self) -> bool {
        self.delta == 0.0
    }

    /// Per-round budget when `rounds` mechanisms share this budget under
    /// basic composition.
    pub fn split_basic(&self, rounds: usize) -> Result<PrivacyBudget> {
        if rounds == 0 {
            return Err(invalid("cannot split a budget into zero rounds"));
        }
        let r = rounds as f64;
        Ok(PrivacyBudget {
            epsilon: self.epsilon / r,
            delta: self.delta / r,
        })
    }
}

/// Basic composition: budgets add up.
pub fn compose_basic(parts: &[PrivacyBudget]) -> PrivacyBudget {
    parts.iter().fold(PrivacyBudget { epsilon: 0.0, delta: 0.0 }, |acc, b| PrivacyBudget {
        epsilon: acc.epsilon + b.epsilon,
        delta: acc.delta + b.delta,
    })
}

/// How a mechanism's reported budget was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccountingRule {
    /// Not private; the budget is nominal.
    NonPrivate,
    /// A single noise-adding release.
    Direct,
    /// Per-step budgets combined by basic composition.
    BasicComposition,
    /// Poisson subsampling of an `(1, δ)` mechanism at rate ε, giving `(2ε, εδ)`.
    SecrecyOfSample,
}

/// Warning text when `δ ≥ 1/n`, the largest δ the hard-instance analysis admits.
pub fn delta_warning(delta: f64, n: usize) -> Option<String> {
    (n > 0 && delta >= 1.0 / n as f64).then(|| format!("delta = {delta} is not below 1/n = {}", 1.0 / n as f64))
}
