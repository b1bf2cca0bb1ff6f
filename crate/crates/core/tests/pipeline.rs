use approx::assert_abs_diff_eq;

use reml::harness::{
    outperformance_fraction, read_runs_csv, run_single, run_sweep, run_sweep_with, runs_csv,
    summarize, test_r2, write_sweep, ScanRow, SweepOptions, SRV_A,
};
use reml::io::{read_trajectory, write_trajectory};
use reml::learner::{learn_a, validation_problem, LearnerConfig};
use reml::synthetic::{
    add_noise, endpoint_shapes, geodesic_between, synthesize, GridCell, SweepGrid, Trajectory,
};
use reml::{RemlError, RunRecord};

#[test]
fn learner_history_is_monotone_and_bounded() {
    let config = LearnerConfig {
        use_coarse_scan: false,
        ..LearnerConfig::default()
    };
    for (a_true, sigma, seed) in [(0.3, 0.0, 1), (0.6, 0.001, 2), (0.8, 0.01, 3)] {
        let traj = synthesize(a_true, 60, 30, sigma, seed).unwrap();
        let result = learn_a(&traj, &config).unwrap();
        let history = &result.r2_val_history;
        assert!(!history.is_empty());
        assert_eq!(history.last().unwrap().0, result.a_star);
        for w in history.windows(2) {
            assert!(w[1].1 >= w[0].1);
        }
        for &(a, _) in history {
            assert!((config.a_min..=config.a_max).contains(&a));
        }
    }
}

#[test]
fn pure_ascent_from_srv_reaches_a_true() {
    let traj = synthesize(0.5, 100, 40, 0.0, 0).unwrap();
    let config = LearnerConfig {
        use_coarse_scan: false,
        ..LearnerConfig::default()
    };
    let result = learn_a(&traj, &config).unwrap();
    assert!((result.a_star - 0.5).abs() <= 0.05, "{}", result.a_star);
    assert!(result.final_r2() >= 0.999);
    assert!(result.iterations > 1);
}

#[test]
fn learner_recovers_srv_when_srv_is_true() {
    for seed in 0..3 {
        let traj = synthesize(1.0, 100, 40, 0.0, seed).unwrap();
        let result = learn_a(&traj, &LearnerConfig::default()).unwrap();
        assert!((result.a_star - 1.0).abs() <= 0.05);
    }
}

#[test]
fn scan_start_is_never_lost() {
    let config = LearnerConfig::default();
    for seed in 0..4 {
        let traj = synthesize(0.7, 50, 30, 0.01, seed).unwrap();
        let problem = validation_problem(&traj).unwrap();
        let best_scan = config
            .scan_grid
            .iter()
            .map(|&a| problem.r_squared_at(a).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let result = learn_a(&traj, &config).unwrap();
        assert!(result.final_r2() >= best_scan);
    }
}

#[test]
fn learner_is_deterministic() {
    let traj = synthesize(0.4, 50, 30, 0.001, 9).unwrap();
    let config = LearnerConfig::default();
    assert_eq!(
        learn_a(&traj, &config).unwrap(),
        learn_a(&traj, &config).unwrap()
    );
}

#[test]
fn identical_curves_have_zero_variance() {
    let (c, _) = endpoint_shapes(30, 0).unwrap();
    let traj = Trajectory::new(vec![c; 20], None, 0.0, 0).unwrap();
    assert_eq!(
        learn_a(&traj, &LearnerConfig::default()).unwrap_err(),
        RemlError::ZeroVariance
    );
}

#[test]
fn noise_has_the_requested_spread() {
    let sigma = 0.01;
    let clean = synthesize(0.5, 500, 100, 0.0, 4).unwrap();
    let noisy = add_noise(&clean, sigma, 17).unwrap();
    let diffs: Vec<f64> = clean
        .curves()
        .iter()
        .zip(noisy.curves())
        .flat_map(|(c, n)| {
            c.points()
                .iter()
                .zip(n.points())
                .flat_map(|(p, q)| [q.x - p.x, q.y - p.y])
                .collect::<Vec<_>>()
        })
        .collect();
    assert!(diffs.len() >= 100_000);
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let sd = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((sd / sigma - 1.0).abs() < 0.02, "sd {sd}");
    assert!(mean.abs() < 0.05 * sigma);
}

#[test]
fn geodesics_are_exact_across_seeds() {
    for seed in 0..20 {
        for a_true in [0.2, 0.5, 0.7, 0.9, 1.0] {
            let (c0, c1) = endpoint_shapes(30, seed).unwrap();
            let traj = geodesic_between(&c0, &c1, a_true, 20).unwrap();
            let problem = validation_problem(&traj).unwrap();
            assert_abs_diff_eq!(problem.r_squared_at(a_true).unwrap(), 1.0, epsilon = 1e-10);
            assert!(problem.r_squared_at(a_true + 0.3).unwrap() < 1.0);
        }
    }
}

#[test]
fn split_covers_every_index_in_order() {
    for n in 5..=60 {
        let traj = synthesize(0.5, n, 12, 0.0, 0).unwrap();
        let (tr, va, te) = (
            traj.train_range(),
            traj.validation_range(),
            traj.test_range(),
        );
        assert_eq!(tr.start, 0);
        assert_eq!(tr.end, va.start);
        assert_eq!(va.end, te.start);
        assert_eq!(te.end, n);
        assert!(!tr.is_empty() && !va.is_empty() && !te.is_empty());
    }
}

fn cell(a_true: f64, n_times: usize, sigma: f64) -> GridCell {
    GridCell {
        a_true,
        n_times,
        n_s: 40,
        sigma,
        seed: 0,
    }
}

#[test]
fn single_runs() {
    let config = LearnerConfig::default();
    let good = run_single(&cell(0.5, 100, 0.0), &config);
    assert!(good.is_success());
    assert!(good.r2_test_astar.unwrap() >= good.r2_test_srv.unwrap());
    assert!(good.r2_test_astar.unwrap() >= 0.999);

    let srv = run_single(&cell(1.0, 100, 0.0), &config);
    assert!((srv.r2_test_astar.unwrap() - srv.r2_test_srv.unwrap()).abs() <= 1e-3);

    let short = run_single(&cell(0.5, 4, 0.0), &config);
    assert!(!short.is_success());
    assert_eq!(
        short.error.as_deref(),
        Some(RemlError::TrajectoryTooShort(4).to_string().as_str())
    );
}

#[test]
fn records_agree_with_recomputation_from_saved_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    for c in [cell(0.2, 50, 0.001), cell(0.9, 100, 0.0)] {
        let record = run_single(&c, &LearnerConfig::default());
        let path = dir.path().join("traj.json");
        write_trajectory(&path, &c.synthesize().unwrap()).unwrap();
        let traj = read_trajectory(&path).unwrap();
        assert_eq!(
            test_r2(&traj, record.a_star.unwrap()).unwrap(),
            record.r2_test_astar.unwrap()
        );
        assert_eq!(test_r2(&traj, SRV_A).unwrap(), record.r2_test_srv.unwrap());
    }
}

#[test]
fn scan_dump_contains_the_srv_column() {
    let grid = SweepGrid {
        a_true_values: vec![0.5, 1.0],
        t_values: vec![50],
        ns_values: vec![30],
        sigma_values: vec![0.0, 0.001],
        seeds: vec![0],
    };
    let options = SweepOptions {
        jobs: 2,
        scan_dump: true,
        ..SweepOptions::default()
    };
    let out = run_sweep_with(&grid, &options, |_| {}).unwrap();
    for record in &out.records {
        let row = out
            .scans
            .iter()
            .find(|s| same_cell(s, record) && s.a == SRV_A)
            .expect("scan row at a = 1");
        assert_eq!(row.r2_test, record.r2_test_srv.unwrap());
    }
}

fn same_cell(s: &ScanRow, r: &RunRecord) -> bool {
    s.a_true == r.a_true
        && s.n_times == r.n_times
        && s.n_s == r.n_s
        && s.sigma == r.sigma
        && s.seed == r.seed
}

#[test]
fn empty_seed_list_gives_no_records() {
    let mut grid = SweepGrid::published();
    grid.seeds.clear();
    assert!(run_sweep(&grid, 2).unwrap().is_empty());
}

#[test]
fn failed_cells_do_not_stop_a_sweep() {
    let grid = SweepGrid {
        a_true_values: vec![0.5],
        t_values: vec![4, 20],
        ns_values: vec![30],
        sigma_values: vec![0.0],
        seeds: vec![0],
    };
    let records = run_sweep(&grid, 2).unwrap();
    assert_eq!(records.len(), 2);
    assert!(!records[0].is_success());
    assert!(records[1].is_success());
}

#[test]
fn published_grid() {
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let records = run_sweep(&SweepGrid::published(), jobs).unwrap();
    assert_eq!(records.len(), 180);
    for r in records.iter().filter(|r| r.is_success()) {
        assert!(r.abs_a_error.unwrap() >= 0.0);
        assert!(r.r2_test_astar.unwrap() <= 1.0 && r.r2_test_srv.unwrap() <= 1.0);
    }
    let clean: Vec<_> = records.iter().filter(|r| r.sigma == 0.0).collect();
    let converged = clean.iter().filter(|r| r.converged == Some(true)).count();
    assert!(
        converged as f64 >= 0.95 * clean.len() as f64,
        "{converged}/{}",
        clean.len()
    );

    let favorable = records.iter().filter(|r| {
        [30, 50].contains(&r.n_s)
            && [100, 200].contains(&r.n_times)
            && r.sigma <= 0.001
            && r.a_true != 1.0
    });
    assert!(outperformance_fraction(favorable).unwrap() >= 0.9);

    let rows = summarize(&records).unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|row| row.runs == 20));
}

#[test]
fn sweep_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = SweepGrid {
        a_true_values: vec![0.7],
        t_values: vec![20],
        ns_values: vec![30],
        sigma_values: vec![0.0, 0.01],
        seeds: vec![0, 1],
    };
    let options = SweepOptions::default();
    let output = run_sweep_with(&grid, &options, |_| {}).unwrap();
    write_sweep(dir.path(), &grid, &options, &output).unwrap();
    for name in ["runs.csv", "summary.csv", "config.json", "timings.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let back = read_runs_csv(&dir.path().join("runs.csv")).unwrap();
    assert_eq!(runs_csv(&back).unwrap(), runs_csv(&output.records).unwrap());
    assert_eq!(
        summarize(&back).unwrap(),
        summarize(&output.records).unwrap()
    );
    assert_eq!(summarize(&[]).unwrap_err(), RemlError::EmptyInput);
}
