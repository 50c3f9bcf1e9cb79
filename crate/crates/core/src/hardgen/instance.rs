use crate::bits::BitMatrix;
use crate::erm::{Dataset, DomainTag};
use crate::error::{invalid, Result};
use crate::fpcode::{gen, CodeParams, CodeSecret, Codebook};
use crate::seed::SeedKey;
use serde::{Deserialize, Serialize};

/// How a dataset of `n` rows is assembled from `k` copies of an `n_k`-user
/// block plus dummy rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPrivacyPlan {
    pub k: usize,
    pub n_k: usize,
    pub pad_zeros: usize,
    pub pad_ones: usize,
    pub pad_halves: usize,
}

impl GroupPrivacyPlan {
    /// Replicate `k` times and fill the remainder with `{0}^d` rows.
    pub fn zero_padded(n: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("replication factor k must be at least 1"));
        }
        let n_k = n / k;
        if n_k < 2 {
            return Err(invalid(format!("n/k = {n}/{k} leaves fewer than 2 users per copy")));
        }
        Ok(GroupPrivacyPlan {
            k,
            n_k,
            pad_zeros: n - k * n_k,
            pad_ones: 0,
            pad_halves: 0,
        })
    }

    pub fn total_pads(&self) -> usize {
        self.pad_zeros + self.pad_ones + self.pad_halves
    }

    pub fn total_rows(&self) -> usize {
        self.k * self.n_k + self.total_pads()
    }
}

/// Which codebook columns become dataset coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceColumns {
    /// The published augmented codebook, dummy columns included.
    Augmented,
    /// Only the real core columns (ablation).
    CoreOnly,
}

#[derive(Clone, Debug)]
pub struct FpHardInstance {
    pub dataset: Dataset,
    /// The `n_k`-row block `D^k` that was replicated.
    pub block: BitMatrix,
    pub codebook: Codebook,
    pub secret: CodeSecret,
    pub plan: GroupPrivacyPlan,
}

/// Generates a code for `n_k = ⌊n/k⌋` users, stacks `k` copies of its rows
/// and appends `n − k·n_k` zero rows.
pub fn fp_hard_instance(
    n: usize,
    k: usize,
    params: &CodeParams,
    key: SeedKey,
    columns: InstanceColumns,
) -> Result<FpHardInstance> {
    let plan = GroupPrivacyPlan::zero_padded(n, k)?;
    if params.n != plan.n_k {
        return Err(invalid(format!(
            "code parameters are for {} users but n/k = {}",
            params.n, plan.n_k
        )));
    }
    let (codebook, secret) = gen(params, key);
    let block = match columns {
        InstanceColumns::Augmented => codebook.bits.clone(),
        InstanceColumns::CoreOnly => codebook.core(&secret).bits,
    };
    let d = block.cols();
    let mut values = Vec::with_capacity(n * d);
    for _ in 0..k {
        for i in 0..block.rows() {
            values.extend(block.row(i).iter().map(|&b| f64::from(b)));
        }
    }
    values.resize(n * d, 0.0);
    let dataset = Dataset::new(d, values, DomainTag::Binary)?;
    Ok(FpHardInstance {
        dataset,
        block,
        codebook,
        secret,
        plan,
    })
}

/// Balanced padding of a deficit: half `{0}^d`, half `{1}^d`, and one
/// `{1/2}^d` row when the deficit is odd.
pub fn balanced_padding(deficit: usize) -> (usize, usize, usize) {
    let half = deficit / 2;
    (half, half, deficit % 2)
}

/// Pads `data` up to `n_target` rows with balanced dummy points.
pub fn pad_dataset(data: &Dataset, n_target: usize) -> Result<Dataset> {
    if n_target < data.len() {
        return Err(invalid(format!(
            "cannot pad {} rows down to {n_target}",
            data.len()
        )));
    }
    let d = data.dim();
    let (zeros, ones, halves) = balanced_padding(n_target - data.len());
    let mut out = data.clone();
    for (count, value) in [(zeros, 0.0), (ones, 1.0), (halves, 0.5)] {
        let row = vec![value; d];
        for _ in 0..count {
            out.push_row(&row)?;
        }
    }
    Ok(out)
}

/// Padding used for a target size `n` given the code-backed size `n_star`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaddingRegime {
    Zeros,
    Balanced,
}

/// Zero padding up to and including `n = n_star`, balanced padding beyond.
pub fn padding_regime(n: usize, n_star: usize) -> PaddingRegime {
    if n <= n_star {
        PaddingRegime::Zeros
    } else {
        PaddingRegime::Balanced
    }
}
