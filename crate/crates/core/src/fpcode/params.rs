use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Parameters of the augmented fingerprinting code for `n` users at
/// security `xi`. Logarithms are natural.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub xi: f64,
    /// Length of the core (Tardos) code.
    pub d_core: usize,
    /// True when `d_core` was set explicitly instead of from `100 n² ln(n/ξ)`.
    pub d_core_overridden: bool,
    /// Length after appending dummy columns, always `5 * d_core`.
    pub d_total: usize,
    /// Bias floor `1/(300 n)`.
    pub t: f64,
    /// Angle with `sin²(t_prime) = t`.
    pub t_prime: f64,
    /// Tracing threshold `20 n ln(n/ξ)`; users scoring at least `z / 2` are accused.
    pub z: f64,
}

/// Number of dummy columns of each kind per core column.
pub const DUMMY_FACTOR: usize = 2;

fn validate(n: usize, xi: f64) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("fingerprinting code needs n >= 2 users, got {n}")));
    }
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(invalid(format!("security parameter xi must lie in (0, 1], got {xi}")));
    }
    Ok(())
}

/// Core length from the formula, `⌈100 n² ln(n/ξ)⌉`.
pub fn formula_d_core(n: usize, xi: f64) -> usize {
    let nf = n as f64;
    (100.0 * nf * nf * (nf / xi).ln()).ceil() as usize
}

pub fn derive_params(n: usize, xi: f64) -> Result<CodeParams> {
    validate(n, xi)?;
    Ok(build(n, xi, formula_d_core(n, xi), false))
}

/// Same as [`derive_params`] with an explicit core length, for desk-scale runs.
pub fn derive_params_with_d_core(n: usize, xi: f64, d_core: usize) -> Result<CodeParams> {
    validate(n, xi)?;
    if d_core == 0 {
        return Err(invalid("d_core must be positive"));
    }
    let overridden = d_core != formula_d_core(n, xi);
    Ok(build(n, xi, d_core, overridden))
}

fn build(n: usize, xi: f64, d_core: usize, overridden: bool) -> CodeParams {
    let nf = n as f64;
    let t = 1.0 / (300.0 * nf);
    let t_prime = t.sqrt().asin();
    debug_assert!(t_prime > 0.0 && t_prime < FRAC_PI_2 / 2.0);
    CodeParams {
        n,
        xi,
        d_core,
        d_core_overridden: overridden,
        d_total: (1 + 2 * DUMMY_FACTOR) * d_core,
        t,
        t_prime,
        z: 20.0 * nf * (nf / xi).ln(),
    }
}

impl CodeParams {
    pub fn threshold(&self) -> f64 {
        self.z / 2.0
    }
}
