use crate::bits::BitMatrix;
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPrivacy {
    pub epsilon: f64,
    pub delta: f64,
    /// Set when `e^{kε}` overflows; `delta` is then `f64::MAX`.
    pub saturated: bool,
}

/// Group privacy for datasets differing in `k` rows: `(kε, kδe^{kε})`.
pub fn group_privacy_params(epsilon: f64, delta: f64, k: usize) -> Result<GroupPrivacy> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(invalid(format!("delta must lie in [0, 1), got {delta}")));
    }
    if k == 0 {
        return Err(invalid("group size k must be at least 1"));
    }
    let kf = k as f64;
    let eps_k = kf * epsilon;
    if delta == 0.0 {
        return Ok(GroupPrivacy {
            epsilon: eps_k,
            delta: 0.0,
            saturated: false,
        });
    }
    let delta_k = kf * delta * eps_k.exp();
    Ok(if delta_k.is_finite() {
        GroupPrivacy {
            epsilon: eps_k,
            delta: delta_k,
            saturated: false,
        }
    } else {
        GroupPrivacy {
            epsilon: eps_k,
            delta: f64::MAX,
            saturated: true,
        }
    })
}

/// Smallest distance from 1/2 at which a column mean of the replicated block
/// is guaranteed to keep its side after zero-padding `n − k·n_k` rows.
///
/// Padding `q` zero rows scales a mean `m` to `m·(n − q)/n`, so a column
/// above 1/2 survives iff `m − 1/2 > q/(2(n − q))`. The returned value is
/// `(q + 1)/(2n)`, which dominates that threshold whenever `n > q(q + 1)`;
/// otherwise it falls back to `q/(2(n − q)) + 1/(2n)`.
pub fn dilution_bound(n: usize, k: usize) -> Result<f64> {
    if k == 0 || n / k == 0 {
        return Err(invalid("dilution bound needs 1 <= k <= n"));
    }
    Ok(dilution_bound_for_pads(n, n - k * (n / k)))
}

/// Dilution bound for `q` padding rows among `n`, `q < n`.
fn dilution_bound_for_pads(n: usize, q: usize) -> f64 {
    let (nf, qf) = (n as f64, q as f64);
    if n > q * (q + 1) {
        (qf + 1.0) / (2.0 * nf)
    } else {
        qf / (2.0 * (nf - qf)) + 1.0 / (2.0 * nf)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Per column: true iff the column is α-biased and its side of 1/2 is
    /// unchanged after replication and zero-padding.
    pub stable: Vec<bool>,
    /// Per column: `|mean − 1/2| ≥ α` and mean ≠ 1/2.
    pub biased: Vec<bool>,
    pub dilution_bound: f64,
    /// `α ≥ dilution_bound`, in which case every biased column is stable.
    pub guaranteed: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Below,
    Tie,
    Above,
}

fn side(twice_count: usize, rows: usize) -> Side {
    match twice_count.cmp(&rows) {
        std::cmp::Ordering::Less => Side::Below,
        std::cmp::Ordering::Equal => Side::Tie,
        std::cmp::Ordering::Greater => Side::Above,
    }
}

/// Checks, column by column and in exact integer arithmetic, whether the side
/// of 1/2 of each α-biased column of `block` survives `k`-fold replication
/// and zero-padding to `n` rows.
pub fn biased_column_stability(block: &BitMatrix, k: usize, n: usize, alpha: f64) -> Result<StabilityReport> {
    let n_k = block.rows();
    if n_k == 0 || k == 0 || k * n_k > n {
        return Err(invalid(format!("block of {n_k} rows replicated {k} times exceeds n = {n}")));
    }
    if !(0.0..=0.5).contains(&alpha) {
        return Err(invalid(format!("alpha must lie in [0, 1/2], got {alpha}")));
    }
    let bound = dilution_bound_for_pads(n, n - k * n_k);
    let counts = block.column_popcounts();
    let biased: Vec<bool> = counts
        .iter()
        .map(|&c| {
            let mean = c as f64 / n_k as f64;
            2 * c != n_k && (mean - 0.5).abs() >= alpha
        })
        .collect();
    let stable = counts
        .iter()
        .zip(&biased)
        .map(|(&c, &b)| b && side(2 * c, n_k) == side(2 * k * c, n))
        .collect();
    Ok(StabilityReport {
        stable,
        biased,
        dilution_bound: bound,
        guaranteed: alpha >= bound,
    })
}
