use super::predicates::{round_to_binary, CoalitionView};
use crate::bits::BitWord;
use crate::erm::Dataset;
use crate::error::Result;
use crate::mech::MechanismHandle;
use crate::seed::Rng;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

/// Produces a forged word from the coalition's codewords alone.
pub trait Adversary: Send + Sync {
    fn forge(&self, view: &CoalitionView, rng: &mut Rng) -> Result<BitWord>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryKind {
    /// Column-wise majority; ties resolve to 1, as rounding the mean would.
    MajorityVote,
    CopyFirstRow,
    /// Copies constant columns, flips a fair coin elsewhere.
    RandomConsistent,
    /// Treats the coalition rows as a dataset, runs a mechanism and rounds
    /// its output.
    MechanismRound(MechanismHandle),
}

impl AdversaryKind {
    pub fn name(&self) -> &'static str {
        match self {
            AdversaryKind::MajorityVote => "majority_vote",
            AdversaryKind::CopyFirstRow => "copy_first_row",
            AdversaryKind::RandomConsistent => "random_consistent",
            AdversaryKind::MechanismRound(_) => "mechanism_round",
        }
    }
}

impl Adversary for AdversaryKind {
    fn forge(&self, view: &CoalitionView, rng: &mut Rng) -> Result<BitWord> {
        let rows = view.rows();
        Ok(match self {
            AdversaryKind::MajorityVote => rows
                .column_popcounts()
                .into_iter()
                .map(|ones| u8::from(2 * ones >= rows.rows()))
                .collect(),
            AdversaryKind::CopyFirstRow => rows.row(0).to_vec(),
            AdversaryKind::RandomConsistent => (0..view.width())
                .map(|j| view.constant_value(j).unwrap_or_else(|| u8::from(rng.random::<bool>())))
                .collect(),
            AdversaryKind::MechanismRound(handle) => {
                let data = Dataset::from_bits(rows);
                round_to_binary(&handle.run(&data, rng)?)
            }
        })
    }
}
