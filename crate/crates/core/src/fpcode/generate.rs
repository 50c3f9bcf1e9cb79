use super::params::{CodeParams, DUMMY_FACTOR};
use crate::bits::{BitMatrix, BitWord};
use crate::exec;
use crate::seed::SeedKey;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// The core code: an `n × d_core` codebook and the per-column bias `p_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoreCode {
    pub bits: BitMatrix,
    pub p: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DummyMark {
    Real,
    Zero,
    One,
}

/// Hidden state shared between generation and tracing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeSecret {
    pub p: Vec<f64>,
    /// `perm[k]` is the published column holding pre-permutation column `k`.
    /// Columns `0..d` are real, `d..3d` zero dummies, `3d..5d` one dummies.
    pub perm: Vec<usize>,
    /// Tag of each published column.
    pub dummy_marks: Vec<DummyMark>,
    pub params: CodeParams,
}

/// The published augmented codebook `C′ ∈ {0,1}^{n × 5d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    pub bits: BitMatrix,
    pub params: CodeParams,
}

/// Class of pre-permutation column `k` for core length `d`.
pub(crate) fn class_of(k: usize, d: usize) -> DummyMark {
    if k < d {
        DummyMark::Real
    } else if k < (1 + DUMMY_FACTOR) * d {
        DummyMark::Zero
    } else {
        DummyMark::One
    }
}

/// Samples the core code. Column `j` draws from its own stream, bias first
/// and then the `n` user bits in row order.
pub fn gen_core(params: &CodeParams, key: SeedKey) -> CoreCode {
    let n = params.n;
    let (lo, hi) = (params.t_prime, std::f64::consts::FRAC_PI_2 - params.t_prime);
    let columns: Vec<(f64, BitWord)> = exec::map_indexed(params.d_core, |j| {
        let mut rng = key.stream(j as u64);
        let r = rng.random_range(lo..=hi);
        let p = r.sin().powi(2).clamp(params.t, 1.0 - params.t);
        let col = (0..n).map(|_| u8::from(rng.random::<f64>() < p)).collect();
        (p, col)
    });
    let (p, cols): (Vec<f64>, Vec<BitWord>) = columns.into_iter().unzip();
    CoreCode {
        bits: BitMatrix::from_columns(n, &cols),
        p,
    }
}

/// Appends `2d` all-zero and `2d` all-one columns and applies a uniformly
/// random column permutation.
pub fn augment(core: &CoreCode, params: &CodeParams, key: SeedKey) -> (Codebook, CodeSecret) {
    let d = params.d_core;
    let total = params.d_total;
    let mut perm: Vec<usize> = (0..total).collect();
    perm.shuffle(&mut key.rng());

    let mut marks = vec![DummyMark::Real; total];
    let mut bits = BitMatrix::zeros(params.n, total);
    for (k, &pos) in perm.iter().enumerate() {
        let mark = class_of(k, d);
        marks[pos] = mark;
        for i in 0..params.n {
            let b = match mark {
                DummyMark::Real => core.bits.get(i, k),
                DummyMark::Zero => 0,
                DummyMark::One => 1,
            };
            bits.set(i, pos, b);
        }
    }
    (
        Codebook {
            bits,
            params: params.clone(),
        },
        CodeSecret {
            p: core.p.clone(),
            perm,
            dummy_marks: marks,
            params: params.clone(),
        },
    )
}

/// Full generation: core code followed by augmentation.
pub fn gen(params: &CodeParams, key: SeedKey) -> (Codebook, CodeSecret) {
    let core = gen_core(params, key.child("core"));
    augment(&core, params, key.child("permutation"))
}

impl CodeSecret {
    /// Published positions of the real columns, in core order.
    pub fn real_positions(&self) -> &[usize] {
        &self.perm[..self.params.d_core]
    }

    /// Strips dummy symbols from a published-length word.
    pub fn extract_core_word(&self, word: &[u8]) -> BitWord {
        self.real_positions().iter().map(|&pos| word[pos]).collect()
    }

    /// Builds the published word whose real symbols are `core_word` and whose
    /// dummy symbols carry their marked value.
    pub fn embed_core_word(&self, core_word: &[u8]) -> BitWord {
        let d = self.params.d_core;
        let mut out = vec![0u8; self.params.d_total];
        for (k, &pos) in self.perm.iter().enumerate() {
            out[pos] = match class_of(k, d) {
                DummyMark::Real => core_word[k],
                DummyMark::Zero => 0,
                DummyMark::One => 1,
            };
        }
        out
    }
}

impl Codebook {
    /// Recovers the core code by undoing the permutation and dropping dummies.
    pub fn core(&self, secret: &CodeSecret) -> CoreCode {
        CoreCode {
            bits: self.bits.select_columns(secret.real_positions()),
            p: secret.p.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpcode::params::derive_params_with_d_core;

    #[test]
    fn biases_stay_in_range_and_generation_is_deterministic() {
        let params = derive_params_with_d_core(5, 0.2, 400).unwrap();
        let a = gen_core(&params, SeedKey::new(11));
        let b = gen_core(&params, SeedKey::new(11));
        assert_eq!(a, b);
        assert_eq!(a.bits.rows(), 5);
        assert_eq!(a.bits.cols(), 400);
        assert!(a.p.iter().all(|&p| p >= params.t && p <= 1.0 - params.t));
        assert_ne!(a, gen_core(&params, SeedKey::new(12)));
    }

    #[test]
    fn augmentation_roundtrip() {
        let params = derive_params_with_d_core(4, 0.1, 60).unwrap();
        let core = gen_core(&params, SeedKey::new(3));
        let (book, secret) = augment(&core, &params, SeedKey::new(4));
        assert_eq!(book.bits.cols(), 300);
        assert_eq!(book.core(&secret), core);

        let mut seen = vec![false; 300];
        for &p in &secret.perm {
            assert!(!seen[p]);
            seen[p] = true;
        }
        let count = |m| secret.dummy_marks.iter().filter(|&&x| x == m).count();
        assert_eq!(count(DummyMark::Real), 60);
        assert_eq!(count(DummyMark::Zero), 120);
        assert_eq!(count(DummyMark::One), 120);
        for (pos, mark) in secret.dummy_marks.iter().enumerate() {
            let col = book.bits.column(pos);
            match mark {
                DummyMark::Zero => assert!(col.iter().all(|&b| b == 0)),
                DummyMark::One => assert!(col.iter().all(|&b| b == 1)),
                DummyMark::Real => {}
            }
        }
    }

    #[test]
    fn embed_then_extract() {
        let params = derive_params_with_d_core(3, 0.5, 10).unwrap();
        let (_, secret) = gen(&params, SeedKey::new(9));
        let w: BitWord = (0..10).map(|j| (j % 3 == 0) as u8).collect();
        let published = secret.embed_core_word(&w);
        assert_eq!(secret.extract_core_word(&published), w);
    }
}
