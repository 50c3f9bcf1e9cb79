use super::budget::{AccountingRule, PrivacyBudget};
use crate::erm::{l1_minimizer, project, Ball, Dataset, LossFamily, LossKind};
use crate::error::{invalid, Error, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgradientParams {
    pub steps: usize,
    pub step_size: f64,
    /// Per-example ℓ2 clipping norm.
    pub clip: f64,
}

impl Default for SubgradientParams {
    fn default() -> Self {
        SubgradientParams {
            steps: 50,
            step_size: 0.05,
            clip: 1.0,
        }
    }
}

impl SubgradientParams {
    fn validate(&self) -> Result<()> {
        if self.steps == 0 || !(self.step_size > 0.0) || !(self.clip > 0.0) {
            return Err(invalid("noisy subgradient needs steps >= 1, step_size > 0 and clip > 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MechanismKind {
    ExactErm,
    LaplaceMean,
    GaussianMean,
    NoisySubgradient(SubgradientParams),
    /// Run `base` on a Poisson subsample that keeps each row with probability `rate`.
    Subsampled { base: Box<MechanismHandle>, rate: f64 },
}

/// A mechanism together with the budget it is claimed to satisfy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MechanismHandle {
    pub kind: MechanismKind,
    pub budget: PrivacyBudget,
    pub accounting: AccountingRule,
}

impl MechanismHandle {
    /// The non-private ℓ1 ERM oracle; `budget` is nominal.
    pub fn exact_erm(budget: PrivacyBudget) -> Self {
        MechanismHandle {
            kind: MechanismKind::ExactErm,
            budget,
            accounting: AccountingRule::NonPrivate,
        }
    }

    pub fn laplace_mean(budget: PrivacyBudget) -> Result<Self> {
        if !budget.is_pure() {
            return Err(invalid("laplace_mean is a pure-DP mechanism and needs delta = 0"));
        }
        Ok(MechanismHandle {
            kind: MechanismKind::LaplaceMean,
            budget,
            accounting: AccountingRule::Direct,
        })
    }

    pub fn gaussian_mean(budget: PrivacyBudget) -> Result<Self> {
        check_gaussian_budget(budget)?;
        if budget.epsilon > 1.0 {
            return Err(invalid(format!(
                "gaussian_mean calibration is valid for epsilon <= 1, got {}",
                budget.epsilon
            )));
        }
        Ok(MechanismHandle {
            kind: MechanismKind::GaussianMean,
            budget,
            accounting: AccountingRule::Direct,
        })
    }

    pub fn noisy_subgradient(budget: PrivacyBudget, params: SubgradientParams) -> Result<Self> {
        params.validate()?;
        if budget.is_pure() {
            return Err(invalid("noisy_subgradient uses Gaussian noise and needs delta > 0"));
        }
        Ok(MechanismHandle {
            kind: MechanismKind::NoisySubgradient(params),
            budget,
            accounting: AccountingRule::BasicComposition,
        })
    }

    /// Builds a handle from its command-line name.
    pub fn from_name(name: &str, budget: PrivacyBudget) -> Result<Self> {
        match name {
            "exact_erm" => Ok(MechanismHandle::exact_erm(budget)),
            "laplace_mean" => MechanismHandle::laplace_mean(PrivacyBudget::pure(budget.epsilon)?),
            "gaussian_mean" => MechanismHandle::gaussian_mean(budget),
            "noisy_subgradient" => MechanismHandle::noisy_subgradient(budget, SubgradientParams::default()),
            other => Err(invalid(format!("unknown mechanism {other:?}"))),
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            MechanismKind::ExactErm => "exact_erm".into(),
            MechanismKind::LaplaceMean => "laplace_mean".into(),
            MechanismKind::GaussianMean => "gaussian_mean".into(),
            MechanismKind::NoisySubgradient(_) => "noisy_subgradient".into(),
            MechanismKind::Subsampled { base, .. } => format!("subsampled({})", base.name()),
        }
    }

    pub fn is_private(&self) -> bool {
        match &self.kind {
            MechanismKind::ExactErm => false,
            MechanismKind::Subsampled { base, .. } => base.is_private(),
            _ => true,
        }
    }

    /// Runs the mechanism on `data`.
    pub fn run<R: Rng + ?Sized>(&self, data: &Dataset, rng: &mut R) -> Result<Vec<f64>> {
        match &self.kind {
            MechanismKind::ExactErm => exact_erm(data),
            MechanismKind::LaplaceMean => laplace_mean(data, self.budget, rng),
            MechanismKind::GaussianMean => gaussian_mean(data, self.budget, rng),
            MechanismKind::NoisySubgradient(params) => {
                let loss = LossFamily {
                    kind: LossKind::L1,
                    lipschitz_g: (data.dim() as f64).sqrt(),
                    geometry: crate::erm::Geometry::Lp(2.0),
                };
                noisy_subgradient(data, &loss, self.budget, *params, rng)
            }
            MechanismKind::Subsampled { base, rate } => {
                let sample = subsample(data, *rate, rng);
                base.run(&sample, rng)
            }
        }
    }
}

/// Non-private comparator: the exact ℓ1 minimizer.
pub fn exact_erm(data: &Dataset) -> Result<Vec<f64>> {
    l1_minimizer(data)
}

fn laplace_sample<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    // Inverse CDF with u uniform on (-1/2, 1/2).
    let u: f64 = rng.random::<f64>() - 0.5;
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// Per-coordinate Laplace scale `Δ₁/ε` with `Δ₁ = diam₁(domain)/n`.
pub fn laplace_scale(data: &Dataset, budget: PrivacyBudget) -> f64 {
    data.l1_domain_diameter() / data.len() as f64 / budget.epsilon
}

/// `q(D)` plus Laplace noise; ε-DP under replace-one neighbors.
pub fn laplace_mean<R: Rng + ?Sized>(data: &Dataset, budget: PrivacyBudget, rng: &mut R) -> Result<Vec<f64>> {
    if !budget.is_pure() {
        return Err(invalid("laplace_mean needs delta = 0"));
    }
    if data.rows().flatten().any(|v| v.abs() > 1.0) {
        return Err(invalid("laplace_mean needs entries in [-1, 1]"));
    }
    let q = data.mean()?;
    let b = laplace_scale(data, budget);
    Ok(q.into_iter().map(|v| v + laplace_sample(b, rng)).collect())
}

fn check_gaussian_budget(budget: PrivacyBudget) -> Result<()> {
    if budget.is_pure() {
        return Err(invalid("gaussian_mean needs delta > 0"));
    }
    Ok(())
}

/// `σ = (√d/n)·√(2 ln(1.25/δ))/ε`.
pub fn gaussian_sigma(d: usize, n: usize, budget: PrivacyBudget) -> f64 {
    (d as f64).sqrt() / n as f64 * (2.0 * (1.25 / budget.delta).ln()).sqrt() / budget.epsilon
}

/// `q(D)` plus isotropic Gaussian noise; `(ε, δ)`-DP for entries in `[0, 1]`
/// and `ε ≤ 1`. Larger ε is accepted here (as a low-noise limit) but refused
/// by [`MechanismHandle::gaussian_mean`], which carries the privacy claim.
pub fn gaussian_mean<R: Rng + ?Sized>(data: &Dataset, budget: PrivacyBudget, rng: &mut R) -> Result<Vec<f64>> {
    check_gaussian_budget(budget)?;
    if data.rows().flatten().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(invalid("gaussian_mean needs entries in [0, 1]"));
    }
    let q = data.mean()?;
    let sigma = gaussian_sigma(data.dim(), data.len(), budget);
    Ok(q.into_iter()
        .map(|v| {
            let g: f64 = StandardNormal.sample(rng);
            v + sigma * g
        })
        .collect())
}

/// Projected noisy subgradient descent on the mean ℓ1 loss over `[0,1]^d`,
/// starting from the cube center.
pub fn noisy_subgradient<R: Rng + ?Sized>(
    data: &Dataset,
    loss: &LossFamily,
    budget: PrivacyBudget,
    params: SubgradientParams,
    rng: &mut R,
) -> Result<Vec<f64>> {
    noisy_subgradient_from(data, loss, budget, params, &vec![0.5; data.dim()], rng)
}

/// As [`noisy_subgradient`] from an explicit starting point.
///
/// Each step averages per-example subgradients `sign(θ − z_i)` (0 on ties)
/// clipped to ℓ2 norm `clip`, adds Gaussian noise for sensitivity `2·clip/n`
/// at the per-step budget `(ε/T, δ/T)`, takes a step and projects back onto
/// the cube. Returns the final iterate.
pub fn noisy_subgradient_from<R: Rng + ?Sized>(
    data: &Dataset,
    loss: &LossFamily,
    budget: PrivacyBudget,
    params: SubgradientParams,
    start: &[f64],
    rng: &mut R,
) -> Result<Vec<f64>> {
    params.validate()?;
    if !matches!(loss.kind, LossKind::L1) {
        return Err(invalid("noisy_subgradient supports only the l1 loss"));
    }
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if budget.is_pure() {
        return Err(invalid("noisy_subgradient needs delta > 0"));
    }
    crate::error::check_len(data.dim(), start.len())?;
    let d = data.dim();
    let n = data.len() as f64;
    let step_budget = budget.split_basic(params.steps)?;
    let sigma = 2.0 * params.clip / n * (2.0 * (1.25 / step_budget.delta).ln()).sqrt() / step_budget.epsilon;
    let cube = Ball::unit_cube(d);
    let mut theta = project(start, &cube);
    let mut grad = vec![0.0; d];
    let mut example = vec![0.0; d];
    for _ in 0..params.steps {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for z in data.rows() {
            let mut sq = 0.0_f64;
            for ((e, t), v) in example.iter_mut().zip(&theta).zip(z) {
                *e = if t > v {
                    1.0
                } else if t < v {
                    -1.0
                } else {
                    0.0
                };
                sq += *e * *e;
            }
            let norm = sq.sqrt();
            let scale = if norm > params.clip { params.clip / norm } else { 1.0 };
            for (g, e) in grad.iter_mut().zip(&example) {
                *g += e * scale / n;
            }
        }
        for (t, g) in theta.iter_mut().zip(&grad) {
            let noise: f64 = StandardNormal.sample(rng);
            *t -= params.step_size * (g + sigma * noise);
        }
        theta = project(&theta, &cube);
    }
    Ok(theta)
}

/// Poisson subsample keeping each row independently with probability `rate`.
pub fn subsample<R: Rng + ?Sized>(data: &Dataset, rate: f64, rng: &mut R) -> Dataset {
    let keep: Vec<usize> = (0..data.len()).filter(|_| rng.random::<f64>() < rate).collect();
    data.select_rows(&keep)
}

/// Wraps a `(1, δ)`-DP mechanism so that it runs on a rate-ε Poisson
/// subsample; the wrapped mechanism is `(2ε, εδ)`-DP.
pub fn subsample_amplify(base: MechanismHandle, target_epsilon: f64) -> Result<MechanismHandle> {
    if !(target_epsilon > 0.0 && target_epsilon < 1.0) {
        return Err(invalid(format!("subsampling rate must lie in (0, 1), got {target_epsilon}")));
    }
    if (base.budget.epsilon - 1.0).abs() > 1e-12 {
        return Err(invalid(format!(
            "amplification expects a (1, delta) base mechanism, got epsilon = {}",
            base.budget.epsilon
        )));
    }
    let budget = PrivacyBudget {
        epsilon: 2.0 * target_epsilon,
        delta: target_epsilon * base.budget.delta,
    };
    Ok(MechanismHandle {
        kind: MechanismKind::Subsampled {
            base: Box::new(base),
            rate: target_epsilon,
        },
        budget,
        accounting: AccountingRule::SecrecyOfSample,
    })
}

/// One logged mechanism run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MechanismLogRow {
    pub mechanism: String,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub excess_loss: f64,
    pub l2_error_vs_mean: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erm::{excess_loss, DomainTag, Geometry};
    use crate::seed::SeedKey;

    fn budget(epsilon: f64, delta: f64) -> PrivacyBudget {
        PrivacyBudget::new(epsilon, delta).unwrap()
    }

    fn constant_rows(row: &[f64], n: usize) -> Dataset {
        Dataset::from_rows(&vec![row.to_vec(); n], DomainTag::Binary).unwrap()
    }

    #[test]
    fn handle_rules() {
        assert!(MechanismHandle::laplace_mean(budget(1.0, 1e-6)).is_err());
        assert!(MechanismHandle::gaussian_mean(budget(1.0, 0.0)).is_err());
        assert!(MechanismHandle::gaussian_mean(budget(2.0, 1e-6)).is_err());
        assert!(MechanismHandle::noisy_subgradient(budget(1.0, 1e-6), SubgradientParams { steps: 0, ..Default::default() })
            .is_err());
        let h = MechanismHandle::from_name("laplace_mean", budget(0.5, 1e-6)).unwrap();
        assert_eq!(h.budget, budget(0.5, 0.0));
        assert!(MechanismHandle::from_name("median_of_means", budget(1.0, 1e-6)).is_err());
        assert!(!MechanismHandle::exact_erm(budget(1.0, 0.0)).is_private());
        assert_eq!(
            MechanismHandle::noisy_subgradient(budget(1.0, 1e-6), SubgradientParams::default()).unwrap().accounting,
            AccountingRule::BasicComposition
        );
    }

    #[test]
    fn exact_erm_on_constant_data() {
        let data = constant_rows(&[1.0, 0.0, 1.0], 5);
        let theta = exact_erm(&data).unwrap();
        assert_eq!(theta, vec![1.0, 0.0, 1.0]);
        let l1 = LossFamily::l1(3, Geometry::Lp(2.0)).unwrap();
        assert!(excess_loss(&l1, &theta, &data).unwrap().excess.abs() <= 1e-9);
    }

    #[test]
    fn vanishing_noise_limits() {
        let data = Dataset::from_rows(&[vec![0.0, 1.0], vec![1.0, 1.0], vec![0.0, 0.0]], DomainTag::Binary).unwrap();
        let q = data.mean().unwrap();
        let mut rng = SeedKey::new(5).rng();
        let lap = laplace_mean(&data, PrivacyBudget::pure(1e9).unwrap(), &mut rng).unwrap();
        let gau = gaussian_mean(&data, budget(1e9, 1e-6), &mut rng).unwrap();
        for j in 0..2 {
            assert!((lap[j] - q[j]).abs() < 1e-6);
            assert!((gau[j] - q[j]).abs() < 1e-6);
        }
    }

    #[test]
    fn gaussian_sigma_value() {
        let sigma = gaussian_sigma(100, 1000, budget(1.0, 1e-6));
        let expected = 0.01 * (2.0 * 1.25e6f64.ln()).sqrt();
        assert!((sigma - expected).abs() < 1e-15);
        assert!((sigma - 0.0530).abs() < 5e-4);
    }

    #[test]
    fn laplace_scale_follows_domain() {
        let bits = constant_rows(&[0.0; 4], 8);
        assert_eq!(laplace_scale(&bits, PrivacyBudget::pure(0.5).unwrap()), 4.0 / 8.0 / 0.5);
        let outside = Dataset::from_rows(&[vec![2.0]], DomainTag::Real).unwrap();
        assert!(laplace_mean(&outside, PrivacyBudget::pure(1.0).unwrap(), &mut SeedKey::new(0).rng()).is_err());
    }

    #[test]
    fn noisy_subgradient_without_noise_reaches_constant_row() {
        let data = constant_rows(&[1.0, 0.0, 0.0, 1.0], 10);
        let l1 = LossFamily::l1(4, Geometry::Lp(2.0)).unwrap();
        let params = SubgradientParams {
            steps: 200,
            ..Default::default()
        };
        let theta = noisy_subgradient(&data, &l1, budget(1e12, 0.5), params, &mut SeedKey::new(1).rng()).unwrap();
        for (t, z) in theta.iter().zip(data.row(0)) {
            assert!((t - z).abs() < 1e-3);
        }
    }

    #[test]
    fn one_step_from_minimizer_stays_close() {
        let data = Dataset::from_rows(&[vec![0.0, 1.0], vec![1.0, 1.0], vec![0.0, 1.0]], DomainTag::Binary).unwrap();
        let l1 = LossFamily::l1(2, Geometry::Lp(2.0)).unwrap();
        let start = l1_minimizer(&data).unwrap();
        let params = SubgradientParams {
            steps: 1,
            step_size: 0.1,
            clip: 0.5,
        };
        let theta =
            noisy_subgradient_from(&data, &l1, budget(1e12, 0.5), params, &start, &mut SeedKey::new(2).rng()).unwrap();
        let moved: f64 = theta.iter().zip(&start).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(moved <= params.step_size * params.clip + 1e-9);
    }

    #[test]
    fn subsampling_budget_and_transparency() {
        let base = MechanismHandle::exact_erm(budget(1.0, 1e-6));
        let wrapped = subsample_amplify(base.clone(), 0.3).unwrap();
        assert!((wrapped.budget.epsilon - 0.6).abs() < 1e-15);
        assert!((wrapped.budget.delta - 3e-7).abs() < 1e-20);
        assert_eq!(wrapped.accounting, AccountingRule::SecrecyOfSample);
        assert!(subsample_amplify(base.clone(), 1.0).is_err());
        assert!(subsample_amplify(MechanismHandle::exact_erm(budget(0.5, 1e-6)), 0.3).is_err());

        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![f64::from(i % 3 == 0), f64::from(i % 2 == 0)]).collect();
        let data = Dataset::from_rows(&rows, DomainTag::Binary).unwrap();
        let key = SeedKey::new(9);
        let out = wrapped.run(&data, &mut key.rng()).unwrap();
        let mut rng = key.rng();
        let sample = subsample(&data, 0.3, &mut rng);
        assert_eq!(out, exact_erm(&sample).unwrap());
    }
}
