//! Splittable seeding on top of the ChaCha counter-mode generator.
//!
//! A [`SeedKey`] is a 64-bit key that can be split into child keys by label
//! and index. Leaf randomness comes from [`SeedKey::stream`], which selects
//! one of ChaCha's 2^64 independent streams, so the same key and index always
//! yield the same sequence regardless of evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type Rng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedKey(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a, used to turn textual labels into stable 64-bit tags.
pub fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

impl SeedKey {
    pub fn new(seed: u64) -> Self {
        SeedKey(seed)
    }

    /// Child key for a named sub-task.
    pub fn child(self, label: &str) -> SeedKey {
        self.index(label_hash(label))
    }

    /// Child key for the `i`-th member of a family (trial, seed, cell, ...).
    pub fn index(self, i: u64) -> SeedKey {
        SeedKey(splitmix64(splitmix64(self.0) ^ splitmix64(i.wrapping_add(0x5851_F42D_4C95_7F2D))))
    }

    /// Independent generator for stream `i` under this key.
    pub fn stream(self, i: u64) -> Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(i);
        rng
    }

    pub fn rng(self) -> Rng {
        self.stream(0)
    }
}
