//! Lower-bound machinery for differentially private empirical risk
//! minimization: fingerprinting codes, marking predicates, ERM losses and
//! oracles, hard-instance generators and baseline private mechanisms.
//!
//! Data-parallel work goes through [`exec`], which uses rayon when the
//! `parallel` feature is on and a plain loop otherwise. Every random draw is
//! keyed by a [`SeedKey`], so results match across execution modes.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bits;
pub mod erm;
pub mod error;
pub mod exec;
pub mod fpcode;
pub mod hardgen;
pub mod marking;
pub mod mech;
pub mod seed;
pub mod stats;

pub use bits::{BitMatrix, BitWord};
pub use error::{Error, Result};
pub use seed::SeedKey;
