use dperm_core::erm::{
    distance, empirical_loss, excess_loss, extended_linear_loss, extended_linear_loss_search, l1_minimizer,
    lipschitz_extension, norm2, project, AbsoluteLoss, Ball, BallNorm, Dataset, DomainTag, Geometry, LinearLoss,
    LossFamily,
};
use proptest::prelude::*;
use std::sync::Arc;

fn grid_dataset() -> impl Strategy<Value = (usize, Vec<Vec<f64>>)> {
    (1usize..=7, 1usize..=3).prop_flat_map(|(n, d)| {
        let cell = prop::sample::select(vec![0.0, 0.5, 1.0]);
        (Just(d), prop::collection::vec(prop::collection::vec(cell, d), n))
    })
}

/// Every point of `{0, 0.05, …, 1}^d`.
fn grid_points(d: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
    let mut points = vec![vec![]];
    for _ in 0..d {
        points = points
            .into_iter()
            .flat_map(|p| axis.iter().map(move |&v| [p.clone(), vec![v]].concat()))
            .collect();
    }
    points
}

fn unit_vector(raw: &[f64]) -> Vec<f64> {
    let n = norm2(raw);
    raw.iter().map(|v| v / n).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn median_beats_every_grid_point((d, rows) in grid_dataset()) {
        let data = Dataset::from_rows(&rows, DomainTag::BinaryHalf).unwrap();
        let l1 = LossFamily::l1(d, Geometry::Lp(2.0)).unwrap();
        let at_median = empirical_loss(&l1, &l1_minimizer(&data).unwrap(), &data).unwrap();
        let best_grid = grid_points(d)
            .iter()
            .map(|p| empirical_loss(&l1, p, &data).unwrap())
            .fold(f64::INFINITY, f64::min);
        prop_assert!(at_median <= best_grid + 1e-9);
    }

    #[test]
    fn projection_is_idempotent(theta in prop::collection::vec(-3.0f64..3.0, 1..6), box_norm in any::<bool>()) {
        let d = theta.len();
        let ball = if box_norm { Ball::unit_cube(d) } else { Ball::unit_l2(d) };
        let once = project(&theta, &ball);
        prop_assert!(ball.contains(&once));
        prop_assert_eq!(project(&once, &ball), once.clone());
        if ball.contains(&theta) {
            prop_assert_eq!(once, theta);
        }
    }

    #[test]
    fn extended_linear_loss_is_bounded_below(
        theta in prop::collection::vec(-4.0f64..4.0, 2..5),
        raw in prop::collection::vec(-1.0f64..1.0, 5),
        scale in 0.0f64..=1.0,
    ) {
        let z: Vec<f64> = raw[..theta.len()].iter().map(|v| v * scale / 5f64.sqrt()).collect();
        let closed = extended_linear_loss(&theta, &z).unwrap();
        let searched = extended_linear_loss_search(&theta, &z).unwrap();
        prop_assert!(closed >= -1.0 - 1e-12);
        prop_assert!((closed - searched).abs() <= 1e-9, "{} vs {}", closed, searched);
    }

    #[test]
    fn l1_excess_is_nonnegative((d, rows) in grid_dataset(), theta in prop::collection::vec(-1.0f64..2.0, 3)) {
        let data = Dataset::from_rows(&rows, DomainTag::BinaryHalf).unwrap();
        let l1 = LossFamily::l1(d, Geometry::Infinity).unwrap();
        prop_assert!(excess_loss(&l1, &theta[..d], &data).unwrap().excess >= -1e-9);
    }
}

#[test]
fn extended_linear_special_values() {
    let z = [0.6, 0.8];
    assert_eq!(extended_linear_loss(&z, &z).unwrap(), -1.0);
    assert!(extended_linear_loss(&[0.8, 0.6], &z).unwrap() > -1.0);
    assert!(extended_linear_loss(&[1.2, 1.6], &z).unwrap() > -1.0);
    assert!((extended_linear_loss(&[3.0, 4.0], &[0.0, 0.0]).unwrap() - 4.0).abs() < 1e-15);
    assert!(extended_linear_loss(&[0.0, 0.0], &[1.0, 1.0]).is_err());
}

#[test]
fn generic_extension_of_linear_loss_matches_closed_form() {
    let ext = lipschitz_extension(Arc::new(LinearLoss), Ball::unit_l2(3), 1.0).unwrap();
    let cases: [(&[f64], &[f64]); 4] = [
        (&[2.0, 0.5, -1.0], &[0.3, 0.4, 0.0]),
        (&[0.1, 0.2, 0.3], &[0.0, 0.0, 1.0]),
        (&[-3.0, 0.0, 0.0], &[0.6, 0.0, 0.8]),
        (&[0.0, 5.0, 0.0], &[0.0, 0.0, 0.0]),
    ];
    for (theta, z) in cases {
        let numeric = ext.eval(theta, z).unwrap();
        let closed = extended_linear_loss(theta, z).unwrap();
        assert!((numeric - closed).abs() < 1e-7, "{theta:?}: {numeric} vs {closed}");
    }
}

#[test]
fn generic_extension_properties() {
    use rand::Rng;
    let d = 3;
    let cube = Ball::unit_cube(d);
    let g = (d as f64).sqrt();
    let ext = lipschitz_extension(Arc::new(AbsoluteLoss), cube.clone(), g).unwrap();
    let mut rng = dperm_core::SeedKey::new(44).rng();
    let z = [0.25, 1.0, 0.0];
    for _ in 0..100 {
        let inside: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let base: f64 = inside.iter().zip(&z).map(|(a, b): (&f64, &f64)| (a - b).abs()).sum();
        assert!((ext.eval(&inside, &z).unwrap() - base).abs() < 1e-6);

        let outside: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..3.0)).collect();
        let other: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..3.0)).collect();
        let (fx, fy) = (ext.eval(&outside, &z).unwrap(), ext.eval(&other, &z).unwrap());
        assert!((fx - fy).abs() <= (1.0 + 1e-6) * g * distance(&outside, &other) + 1e-9);
        let projected = project(&outside, &cube);
        assert!(ext.eval(&projected, &z).unwrap() <= fx + 1e-6);
    }
}

#[test]
fn extended_linear_excess_is_zero_at_normalized_mean() {
    let rows = vec![unit_vector(&[1.0, 1.0]), unit_vector(&[1.0, -0.5]), vec![0.0, 0.0]];
    let data = Dataset::from_rows(&rows, DomainTag::Real).unwrap();
    let loss = LossFamily::extended_linear();
    let q = data.mean().unwrap();
    let best = unit_vector(&q);
    let report = excess_loss(&loss, &best, &data).unwrap();
    assert!(report.excess.abs() <= 1e-9);
    assert!((report.optimal_loss + norm2(&q)).abs() < 1e-12);
    let far = excess_loss(&loss, &[-2.0, 0.0], &data).unwrap();
    assert!(far.excess > 0.0);
}

#[test]
fn l1_excess_examples() {
    let l1 = LossFamily::l1(1, Geometry::Lp(1.0)).unwrap();
    let data = Dataset::new(1, vec![0.0, 0.0, 1.0], DomainTag::Binary).unwrap();
    let report = excess_loss(&l1, &[1.0], &data).unwrap();
    assert!((report.excess - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(report.minimizer, vec![0.0]);

    // Constant columns: the complement pays the full distance in every column.
    let constant = Dataset::from_rows(&vec![vec![1.0, 0.0, 1.0, 1.0]; 6], DomainTag::Binary).unwrap();
    let l1 = LossFamily::l1(4, Geometry::Lp(2.0)).unwrap();
    let report = excess_loss(&l1, &[0.0, 1.0, 0.0, 0.0], &constant).unwrap();
    assert_eq!(report.excess, 4.0);
}

#[test]
fn box_and_ball_domains_validate() {
    assert!(Ball::new(vec![0.0], -1.0, BallNorm::L2).is_err());
    assert_eq!(project(&[2.0, 0.0], &Ball::unit_l2(2)), vec![1.0, 0.0]);
    assert_eq!(project(&[-0.5, 1.5], &Ball::unit_cube(2)), vec![0.0, 1.0]);
}
