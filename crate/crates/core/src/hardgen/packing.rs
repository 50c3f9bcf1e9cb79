use crate::erm::{distance, Dataset, DomainTag};
use crate::error::{invalid, Error, Result};
use crate::seed::SeedKey;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Minimum pairwise ℓ2 distance of a packing family.
pub const MIN_SEPARATION: f64 = 1.0 / 8.0;

/// Unit-norm sign vectors `{±1/√d}^d` at pairwise distance at least 1/8.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingFamily {
    pub d: usize,
    pub points: Vec<Vec<f64>>,
    pub min_separation: f64,
}

impl PackingFamily {
    /// Smallest pairwise distance, by direct O(m²d) comparison.
    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.min(distance(a, b));
            }
        }
        best
    }
}

fn capacity_allows(d: usize, m: usize) -> bool {
    // m ≤ 2^{d/2}
    let half = d as f64 / 2.0;
    half >= 63.0 || (m as f64) <= half.exp2()
}

/// Rejection-samples `m` separated sign vectors. Each conflicting candidate
/// counts as one resample; the run gives up after `10 m²` resamples.
pub fn packing_points(d: usize, m: usize, key: SeedKey) -> Result<PackingFamily> {
    if d == 0 || m == 0 {
        return Err(invalid("packing needs d >= 1 and m >= 1"));
    }
    if !capacity_allows(d, m) {
        return Err(invalid(format!("cannot pack {m} points in dimension {d}: m must not exceed 2^(d/2)")));
    }
    sample_separated(d, m, 10 * m * m, key)
}

fn sample_separated(d: usize, m: usize, budget: usize, key: SeedKey) -> Result<PackingFamily> {
    let scale = 1.0 / (d as f64).sqrt();
    let mut rng = key.rng();
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut resamples = 0usize;
    while points.len() < m {
        let candidate: Vec<f64> = (0..d)
            .map(|_| if rng.random::<bool>() { scale } else { -scale })
            .collect();
        if points.iter().all(|p| distance(p, &candidate) >= MIN_SEPARATION) {
            points.push(candidate);
        } else {
            resamples += 1;
            if resamples > budget {
                return Err(Error::PackingFailed {
                    attempts: resamples,
                    accepted: points.len(),
                    requested: m,
                });
            }
        }
    }
    Ok(PackingFamily {
        d,
        points,
        min_separation: MIN_SEPARATION,
    })
}

/// Size of the packing family drawn for a pure-DP instance.
pub const PURE_DP_FAMILY_SIZE: usize = 8;

#[derive(Clone, Debug)]
pub struct PureDpInstance {
    pub dataset: Dataset,
    pub family: PackingFamily,
    /// Index of the packing point copied into the dataset.
    pub chosen: usize,
    /// Number of copies `n* = min(n, ⌈d/(20ε)⌉)`.
    pub n_star: usize,
}

/// `n*` copies of one packing point followed by `n − n*` zero rows.
pub fn pure_dp_instance(n: usize, d: usize, epsilon: f64, key: SeedKey) -> Result<PureDpInstance> {
    if n < 2 || d < 2 {
        return Err(invalid("pure-DP instance needs n >= 2 and d >= 2"));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let n_star = ((d as f64 / (20.0 * epsilon)).ceil() as usize).min(n);
    let m = (1..=PURE_DP_FAMILY_SIZE).rev().find(|&m| capacity_allows(d, m)).unwrap_or(1);
    let family = packing_points(d, m, key.child("packing"))?;
    let chosen = key.child("choice").rng().random_range(0..m);
    let mut values = Vec::with_capacity(n * d);
    for _ in 0..n_star {
        values.extend_from_slice(&family.points[chosen]);
    }
    values.resize(n * d, 0.0);
    let dataset = Dataset::new(d, values, DomainTag::Packing)?;
    Ok(PureDpInstance {
        dataset,
        family,
        chosen,
        n_star,
    })
}
