use approx::{assert_abs_diff_eq, assert_relative_eq};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reml::curve::derivative;
use reml::gradient::{df_da, dmse_da, dr2_da, dvar_da, fd_r2_gradient, RegressionProblem, FD_EPS};
use reml::learner::validation_problem;
use reml::regression::{fit, mse, predict, r_squared, variance, TimeDesign};
use reml::synthetic::{endpoint_shapes, synthesize, Trajectory};
use reml::{f_forward, f_inverse, FPoint, PlanarCurve, RemlError, Vec2};

fn noisy(seed: u64) -> Trajectory {
    synthesize(0.6, 30, 25, 0.005, seed).unwrap()
}

fn clean(a_true: f64) -> Trajectory {
    synthesize(a_true, 50, 30, 0.0, 3).unwrap()
}

fn mse_at(p: &RegressionProblem, a: f64) -> f64 {
    mse(
        &p.fit_at(a).unwrap(),
        &p.transform_eval(a).unwrap(),
        p.eval_times(),
    )
    .unwrap()
}

fn var_at(p: &RegressionProblem, a: f64) -> f64 {
    variance(&p.transform_eval(a).unwrap()).unwrap()
}

fn central(f: impl Fn(f64) -> f64, a: f64, eps: f64) -> f64 {
    (f(a + eps) - f(a - eps)) / (2.0 * eps)
}

#[test]
fn df_da_matches_finite_differences() {
    for seed in 0..10 {
        let traj = noisy(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rng.random_range(0.2..2.0);
        let v = derivative(&traj.curves()[seed as usize]).unwrap();
        let analytic = df_da(&v, a).unwrap();
        let (up, down) = (
            f_forward(&v, a + FD_EPS).unwrap(),
            f_forward(&v, a - FD_EPS).unwrap(),
        );
        let scale = analytic.iter().map(|d| d.norm()).fold(1e-3, f64::max);
        for ((d, p), m) in analytic.iter().zip(up.samples()).zip(down.samples()) {
            let fd = (*p - *m) / (2.0 * FD_EPS);
            assert!((*d - fd).norm() <= 1e-5 * scale, "{d:?} vs {fd:?}");
        }
    }
}

#[test]
fn dmse_and_dvar_match_finite_differences() {
    for seed in 0..10 {
        let p = validation_problem(&noisy(seed)).unwrap();
        let a = 0.3 + 0.15 * seed as f64;
        let fd_mse = central(|x| mse_at(&p, x), a, FD_EPS);
        let fd_var = central(|x| var_at(&p, x), a, FD_EPS);
        assert_relative_eq!(
            dmse_da(&p, a).unwrap(),
            fd_mse,
            max_relative = 1e-5,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            dvar_da(p.eval(), a).unwrap(),
            fd_var,
            max_relative = 1e-5,
            epsilon = 1e-9
        );
    }
}

#[test]
fn report_satisfies_quotient_rule() {
    let p = validation_problem(&noisy(4)).unwrap();
    for a in [0.25, 0.8, 1.4] {
        let r = dr2_da(&p, a).unwrap();
        let assembled = -(r.dmse_da * r.var - r.mse * r.dvar_da) / (r.var * r.var);
        assert_abs_diff_eq!(r.dr2_da, assembled, epsilon = 1e-12);
        assert_abs_diff_eq!(r.r2, 1.0 - r.mse / r.var, epsilon = 1e-12);
        assert_relative_eq!(
            r.dr2_da,
            fd_r2_gradient(&p, a, FD_EPS).unwrap(),
            max_relative = 1e-4,
            epsilon = 1e-6
        );
    }
}

#[test]
fn finite_difference_error_is_second_order() {
    let p = validation_problem(&noisy(5)).unwrap();
    let a = 0.7;
    let exact = dr2_da(&p, a).unwrap().dr2_da;
    let e1 = (fd_r2_gradient(&p, a, 2e-2).unwrap() - exact).abs();
    let e2 = (fd_r2_gradient(&p, a, 1e-2).unwrap() - exact).abs();
    let ratio = e1 / e2;
    assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn gradient_vanishes_on_exact_geodesic() {
    for a_true in [0.2, 0.5, 0.9, 1.0] {
        let p = validation_problem(&clean(a_true)).unwrap();
        assert!(dmse_da(&p, a_true).unwrap().abs() <= 1e-8);
        assert!(dr2_da(&p, a_true).unwrap().dr2_da.abs() <= 1e-7);
        assert!(dr2_da(&p, a_true - 0.15).unwrap().dr2_da > 0.0);
        assert!(dr2_da(&p, a_true + 0.2).unwrap().dr2_da < 0.0);
    }
}

#[test]
fn gradient_sign_change_brackets_a_true() {
    let a_true = 0.7;
    let p = validation_problem(&clean(a_true)).unwrap();
    let step = 0.02;
    let grid: Vec<f64> = (0..60).map(|i| 0.2 + step * i as f64).collect();
    let signs: Vec<(f64, f64)> = grid
        .iter()
        .map(|&a| (a, dr2_da(&p, a).unwrap().dr2_da))
        .collect();
    let changes: Vec<f64> = signs
        .windows(2)
        .filter(|w| w[0].1 > 0.0 && w[1].1 <= 0.0)
        .map(|w| 0.5 * (w[0].0 + w[1].0))
        .collect();
    assert!(
        changes.iter().any(|&m| (m - a_true).abs() <= step),
        "{changes:?}"
    );
}

#[test]
fn duplicated_curve_gives_zero_mse_and_variance_derivatives() {
    let (c0, _) = endpoint_shapes(20, 1).unwrap();
    let v = derivative(&c0).unwrap();
    let p = RegressionProblem::new(
        vec![v.clone(), v.clone()],
        vec![0.0, 0.5],
        vec![v.clone(), v],
        vec![0.6, 0.9],
    )
    .unwrap();
    assert_abs_diff_eq!(dmse_da(&p, 0.7).unwrap(), 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(dvar_da(p.eval(), 0.7).unwrap(), 0.0, epsilon = 1e-14);
    assert_eq!(dr2_da(&p, 0.7).unwrap_err(), RemlError::ZeroVariance);
}

fn random_point(rng: &mut ChaCha8Rng, m: usize) -> FPoint {
    let samples = (0..m)
        .map(|_| Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    FPoint::new(samples, 0.8, 1.0 / m as f64, 0.0).unwrap()
}

#[test]
fn affine_data_is_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (b0, b1) = (random_point(&mut rng, 12), random_point(&mut rng, 12));
    let times = vec![0.0, 0.1, 0.35, 0.4, 0.8];
    let train: Vec<FPoint> = times
        .iter()
        .map(|&t| FPoint::linear_combination(&[(1.0, &b0), (t, &b1)]).unwrap())
        .collect();
    let model = fit(&train, &TimeDesign::new(times.clone()).unwrap()).unwrap();
    for (got, want) in [(model.beta0(), &b0), (model.beta1(), &b1)] {
        for (g, w) in got.samples().iter().zip(want.samples()) {
            assert!((*g - *w).norm() <= 1e-10);
        }
    }
    let at = predict(&model, times[2]);
    for (g, w) in at.samples().iter().zip(train[2].samples()) {
        assert!((*g - *w).norm() <= 1e-12);
    }
    assert_eq!(predict(&model, 0.0).samples(), model.beta0().samples());
    assert_abs_diff_eq!(mse(&model, &train, &times).unwrap(), 0.0, epsilon = 1e-24);
}

#[test]
fn least_squares_is_optimal_against_perturbations() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let n = rng.random_range(3..15);
        let times: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let train: Vec<FPoint> = (0..n).map(|_| random_point(&mut rng, 10)).collect();
        let model = fit(&train, &TimeDesign::new(times.clone()).unwrap()).unwrap();
        let best = mse(&model, &train, &times).unwrap();
        for _ in 0..5 {
            let delta = random_point(&mut rng, 10);
            let shifted =
                FPoint::linear_combination(&[(1.0, model.beta0()), (1e-3, &delta)]).unwrap();
            let residual: f64 = train
                .iter()
                .zip(&times)
                .map(|(q, &t)| {
                    q.samples()
                        .iter()
                        .zip(shifted.samples())
                        .zip(model.beta1().samples())
                        .map(|((&y, &b0), &b1)| (y - (b0 + b1 * t)).norm_sq())
                        .sum::<f64>()
                })
                .sum::<f64>()
                * shifted.ds();
            assert!(residual >= best);
        }
    }
}

#[test]
fn r_squared_is_invariant_under_a_common_offset() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let times = vec![0.0, 0.2, 0.4, 0.6];
    let eval_times = vec![0.7, 0.8, 0.9];
    let train: Vec<FPoint> = (0..4).map(|_| random_point(&mut rng, 8)).collect();
    let eval: Vec<FPoint> = (0..3).map(|_| random_point(&mut rng, 8)).collect();
    let offset = random_point(&mut rng, 8);
    let shift = |v: &[FPoint]| -> Vec<FPoint> {
        v.iter()
            .map(|q| FPoint::linear_combination(&[(1.0, q), (1.0, &offset)]).unwrap())
            .collect()
    };
    let design = TimeDesign::new(times).unwrap();
    let r0 = r_squared(&fit(&train, &design).unwrap(), &eval, &eval_times).unwrap();
    let r1 = r_squared(
        &fit(&shift(&train), &design).unwrap(),
        &shift(&eval),
        &eval_times,
    )
    .unwrap();
    assert_relative_eq!(r0, r1, max_relative = 1e-10);
}

#[test]
fn exact_geodesic_scores_one_only_under_its_own_metric() {
    let traj = clean(0.5);
    let p = validation_problem(&traj).unwrap();
    assert_abs_diff_eq!(p.r_squared_at(0.5).unwrap(), 1.0, epsilon = 1e-10);
    assert!(p.r_squared_at(0.8).unwrap() < 1.0);
    assert!(p.r_squared_at(0.3).unwrap() < 1.0);
}

#[test]
fn predictions_invert_to_valid_curves() {
    let traj = noisy(7);
    let p = validation_problem(&traj).unwrap();
    let model = p.fit_at(0.6).unwrap();
    for &t in traj.times() {
        let curve: PlanarCurve = f_inverse(&predict(&model, t), Vec2::ZERO).unwrap();
        assert_eq!(curve.len(), traj.n_samples());
        assert!(curve.points().iter().all(|p| p.is_finite()));
    }
}
