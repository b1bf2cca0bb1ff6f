//! Learn the stretching parameter from a trajectory by gradient ascent on
//! validation R², then compare it with the SRV metric on the test split.
//!
//! Usage: `cargo run --example learn_metric -- [a_true] [sigma]`

use reml::harness::compare;
use reml::learner::LearnerConfig;
use reml::synthetic::synthesize;

fn main() -> reml::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|s| s.parse::<f64>().expect("numeric argument"));
    let a_true = args.next().unwrap_or(0.5);
    let sigma = args.next().unwrap_or(0.0);
    let traj = synthesize(a_true, 100, 40, sigma, 0)?;

    let config = LearnerConfig {
        use_coarse_scan: false,
        ..LearnerConfig::default()
    };
    let cmp = compare(&traj, &config)?;
    for (i, (a, r2)) in cmp.learn.r2_val_history.iter().enumerate().take(15) {
        println!("iter {i:3}: a = {a:.6}, validation R² = {r2:.9}");
    }
    println!(
        "a* = {:.6} after {} iterations (converged: {}), a_true = {a_true}",
        cmp.learn.a_star, cmp.learn.iterations, cmp.learn.converged
    );
    println!(
        "test R²: a* {:.6}, SRV {:.6}",
        cmp.r2_test_astar, cmp.r2_test_srv
    );
    Ok(())
}
