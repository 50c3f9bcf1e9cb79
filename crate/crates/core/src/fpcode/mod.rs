//! Error-robust fingerprinting code: a Tardos-style core code augmented with
//! constant dummy columns and hidden by a random column permutation.

mod generate;
pub mod io;
mod params;
mod trace;

pub use generate::{augment, gen, gen_core, CodeSecret, Codebook, CoreCode, DummyMark};
pub use params::{derive_params, derive_params_with_d_core, formula_d_core, CodeParams};
pub use trace::{score_weights, scores, trace, trace_core, verify_secret, Accusation};
