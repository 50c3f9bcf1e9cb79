//! Marking-condition and biased-mean predicates, adversaries, and the
//! Monte Carlo security experiment.

mod adversary;
mod experiment;
mod predicates;

pub use adversary::{Adversary, AdversaryKind};
pub use experiment::{run_security_experiment, SecurityStats, SecuritySummary, TrialOutcome};
pub use predicates::{
    biased_mean_fraction, in_f_beta, marking_violation_fraction, round_to_binary, CoalitionView,
};
