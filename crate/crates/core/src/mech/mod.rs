//! Baseline private mechanisms used as comparators, and privacy bookkeeping.

mod budget;
mod mechanisms;

pub use budget::{compose_basic, delta_warning, AccountingRule, PrivacyBudget};
pub use mechanisms::{
    exact_erm, gaussian_mean, gaussian_sigma, laplace_mean, laplace_scale, noisy_subgradient, noisy_subgradient_from,
    subsample, subsample_amplify, MechanismHandle, MechanismKind, MechanismLogRow, SubgradientParams,
};
