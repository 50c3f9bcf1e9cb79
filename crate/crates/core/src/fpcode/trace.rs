use super::generate::{class_of, CodeSecret, Codebook, CoreCode, DummyMark};
use super::params::CodeParams;
use crate::error::{check_len, Error, Result};
use crate::exec;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Outcome of tracing a forged word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Accusation {
    /// The accused user (0-based), or `None` for ⊥.
    pub accused: Option<usize>,
    /// Score `S_i` of every user.
    pub scores: Vec<f64>,
    /// Every user with `S_i ≥ Z/2`, ascending.
    pub accused_set: Vec<usize>,
}

/// `q_j = √((1 − p_j)/p_j)` for every column.
pub fn score_weights(p: &[f64]) -> Vec<f64> {
    p.iter().map(|&pj| ((1.0 - pj) / pj).sqrt()).collect()
}

/// Scores `S_i(c) = Σ_j c_j U_ij`, summed in ascending column order.
pub fn scores(core: &CoreCode, c: &[u8]) -> Result<Vec<f64>> {
    check_len(core.bits.cols(), c.len())?;
    check_len(core.bits.cols(), core.p.len())?;
    let q = score_weights(&core.p);
    Ok(exec::map_indexed(core.bits.rows(), |i| {
        core.bits
            .row(i)
            .iter()
            .zip(c)
            .zip(&q)
            .filter(|((_, &cj), _)| cj == 1)
            .map(|((&bit, _), &qj)| if bit == 1 { qj } else { -1.0 / qj })
            .sum()
    }))
}

/// Tracing on the core code. Ties at exactly `Z/2` are accused.
pub fn trace_core<R: Rng + ?Sized>(
    core: &CoreCode,
    params: &CodeParams,
    c: &[u8],
    rng: &mut R,
) -> Result<Accusation> {
    let scores = scores(core, c)?;
    let threshold = params.threshold();
    let accused_set: Vec<usize> = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= threshold)
        .map(|(i, _)| i)
        .collect();
    let accused = if accused_set.is_empty() {
        None
    } else {
        Some(accused_set[rng.random_range(0..accused_set.len())])
    };
    Ok(Accusation {
        accused,
        scores,
        accused_set,
    })
}

/// Checks that `secret` describes `codebook`: shapes, permutation, mark counts
/// and the constant value of every dummy column.
pub fn verify_secret(codebook: &Codebook, secret: &CodeSecret) -> Result<()> {
    let mismatch = |msg: String| Err(Error::SecretMismatch(msg));
    let params = &secret.params;
    if params.n != codebook.params.n || params.d_core != codebook.params.d_core {
        return mismatch(format!(
            "secret is for n={} d_core={}, codebook is n={} d_core={}",
            params.n, params.d_core, codebook.params.n, codebook.params.d_core
        ));
    }
    let total = params.d_total;
    if codebook.bits.rows() != params.n || codebook.bits.cols() != total {
        return mismatch("codebook shape does not match its header".into());
    }
    if secret.p.len() != params.d_core || secret.perm.len() != total || secret.dummy_marks.len() != total {
        return mismatch("secret vector lengths do not match parameters".into());
    }
    if secret.p.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return mismatch("column bias outside (0, 1)".into());
    }
    let mut seen = vec![false; total];
    for (k, &pos) in secret.perm.iter().enumerate() {
        if pos >= total || seen[pos] {
            return mismatch("perm is not a permutation".into());
        }
        seen[pos] = true;
        if secret.dummy_marks[pos] != class_of(k, params.d_core) {
            return mismatch(format!("column {pos} is marked inconsistently with perm"));
        }
    }
    for (pos, mark) in secret.dummy_marks.iter().enumerate() {
        let expected = match mark {
            DummyMark::Real => continue,
            DummyMark::Zero => 0,
            DummyMark::One => 1,
        };
        if (0..params.n).any(|i| codebook.bits.get(i, pos) != expected) {
            return mismatch(format!("dummy column {pos} is not constant {expected}"));
        }
    }
    Ok(())
}

/// Full tracing: undo the permutation, drop dummy symbols (whatever their
/// value) and trace on the core code.
pub fn trace<R: Rng + ?Sized>(
    codebook: &Codebook,
    secret: &CodeSecret,
    c_prime: &[u8],
    rng: &mut R,
) -> Result<Accusation> {
    check_len(codebook.params.d_total, c_prime.len())?;
    verify_secret(codebook, secret)?;
    let core = codebook.core(secret);
    let c = secret.extract_core_word(c_prime);
    trace_core(&core, &secret.params, &c, rng)
}
