use dperm_core::erm::{excess_loss, Dataset, DomainTag, Geometry, LossFamily};
use dperm_core::hardgen::pure_dp_instance;
use dperm_core::mech::{
    compose_basic, gaussian_mean, gaussian_sigma, laplace_mean, laplace_scale, noisy_subgradient, subsample,
    PrivacyBudget, SubgradientParams,
};
use dperm_core::stats::log_log_slope;
use dperm_core::SeedKey;

fn small_binary() -> Dataset {
    let rows: Vec<Vec<f64>> = (0..10)
        .map(|i| (0..4).map(|j| f64::from((i + j) % 3 == 0)).collect())
        .collect();
    Dataset::from_rows(&rows, DomainTag::Binary).unwrap()
}

#[test]
fn laplace_mean_absolute_deviation() {
    let data = small_binary();
    let budget = PrivacyBudget::pure(0.7).unwrap();
    let q = data.mean().unwrap();
    let b = laplace_scale(&data, budget);
    assert!((b - 4.0 / 10.0 / 0.7).abs() < 1e-15);
    let mut rng = SeedKey::new(31).rng();
    let mut total = 0.0;
    let trials = 10_000;
    for _ in 0..trials {
        let out = laplace_mean(&data, budget, &mut rng).unwrap();
        total += out.iter().zip(&q).map(|(o, m)| (o - m).abs()).sum::<f64>();
    }
    let mad = total / (trials * 4) as f64;
    assert!((mad / b - 1.0).abs() < 0.05, "MAD {mad} vs scale {b}");
}

#[test]
fn gaussian_noise_matches_sigma() {
    let data = small_binary();
    let budget = PrivacyBudget::new(0.9, 1e-5).unwrap();
    let q = data.mean().unwrap();
    let sigma = gaussian_sigma(4, 10, budget);
    let mut rng = SeedKey::new(32).rng();
    let mut sq = 0.0;
    let draws = 10_000;
    for _ in 0..draws / 4 {
        let out = gaussian_mean(&data, budget, &mut rng).unwrap();
        sq += out.iter().zip(&q).map(|(o, m)| (o - m).powi(2)).sum::<f64>();
    }
    let sd = (sq / draws as f64).sqrt();
    assert!((sd / sigma - 1.0).abs() < 0.03, "sd {sd} vs sigma {sigma}");
}

#[test]
fn consecutive_trials_are_uncorrelated() {
    let data = small_binary();
    let budget = PrivacyBudget::new(1.0, 1e-6).unwrap();
    let q = data.mean().unwrap();
    let key = SeedKey::new(33);
    let noise: Vec<Vec<f64>> = (0..2000u64)
        .map(|t| {
            let out = gaussian_mean(&data, budget, &mut key.index(t).rng()).unwrap();
            out.iter().zip(&q).map(|(o, m)| o - m).collect()
        })
        .collect();
    let xs: Vec<f64> = noise[..noise.len() - 1].iter().flatten().copied().collect();
    let ys: Vec<f64> = noise[1..].iter().flatten().copied().collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&xs), mean(&ys));
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    assert!((cov / (vx * vy).sqrt()).abs() < 0.05);
    assert_eq!(noise[5], {
        let out = gaussian_mean(&data, budget, &mut key.index(5).rng()).unwrap();
        out.iter().zip(&q).map(|(o, m)| o - m).collect::<Vec<_>>()
    });
}

#[test]
fn laplace_error_grows_linearly_in_dimension() {
    let (n, epsilon) = (100, 1.0);
    let budget = PrivacyBudget::pure(epsilon).unwrap();
    let dims = [16usize, 64, 256];
    let errors: Vec<f64> = dims
        .iter()
        .map(|&d| {
            let inst = pure_dp_instance(n, d, epsilon, SeedKey::new(34).index(d as u64)).unwrap();
            let q = inst.dataset.mean().unwrap();
            let key = SeedKey::new(35).index(d as u64);
            (0..200u64)
                .map(|t| {
                    let out = laplace_mean(&inst.dataset, budget, &mut key.index(t).rng()).unwrap();
                    out.iter().zip(&q).map(|(o, m)| (o - m).powi(2)).sum::<f64>().sqrt()
                })
                .sum::<f64>()
                / 200.0
        })
        .collect();
    let xs: Vec<f64> = dims.iter().map(|&d| d as f64).collect();
    let slope = log_log_slope(&xs, &errors).unwrap();
    assert!((slope - 1.0).abs() <= 0.15, "slope {slope}");
}

#[test]
fn subgradient_excess_falls_with_epsilon() {
    let rows: Vec<Vec<f64>> = (0..60)
        .map(|i| (0..8).map(|j| f64::from((i * 7 + j * 3) % 5 < 2 + j % 2)).collect())
        .collect();
    let data = Dataset::from_rows(&rows, DomainTag::Binary).unwrap();
    let l1 = LossFamily::l1(8, Geometry::Lp(2.0)).unwrap();
    let params = SubgradientParams::default();
    let mean_excess = |epsilon: f64| {
        let budget = PrivacyBudget::new(epsilon, 1e-5).unwrap();
        (0..50u64)
            .map(|t| {
                let theta =
                    noisy_subgradient(&data, &l1, budget, params, &mut SeedKey::new(36).index(t).rng()).unwrap();
                excess_loss(&l1, &theta, &data).unwrap().excess
            })
            .sum::<f64>()
            / 50.0
    };
    let excesses: Vec<f64> = [0.1, 1.0, 10.0].iter().map(|&e| mean_excess(e)).collect();
    assert!(excesses[0] > excesses[1] && excesses[1] > excesses[2], "{excesses:?}");
}

#[test]
fn subsample_size_is_binomial() {
    let rows = vec![vec![0.0, 1.0]; 200];
    let data = Dataset::from_rows(&rows, DomainTag::Binary).unwrap();
    let mut rng = SeedKey::new(37).rng();
    let total: usize = (0..10_000).map(|_| subsample(&data, 0.5, &mut rng).len()).sum();
    let mean = total as f64 / 10_000.0;
    assert!((mean / 100.0 - 1.0).abs() < 0.05);
}

#[test]
fn basic_composition_adds_up() {
    let budget = PrivacyBudget::new(1.0, 1e-6).unwrap();
    let parts = vec![budget.split_basic(8).unwrap(); 8];
    let total = compose_basic(&parts);
    assert!((total.epsilon - 1.0).abs() < 1e-12);
    assert!((total.delta - 1e-6).abs() < 1e-18);
}
