//! Run a small parameter sweep and print the per-(n_s, σ) summary.
//!
//! Usage: `cargo run --release --example parameter_sweep -- [out_dir]`

use std::path::PathBuf;

use reml::harness::{run_sweep_with, summarize, write_sweep, SweepOptions};
use reml::synthetic::SweepGrid;

fn main() -> reml::Result<()> {
    let grid = SweepGrid {
        a_true_values: vec![0.2, 0.5, 1.0],
        t_values: vec![50, 100],
        ns_values: vec![30, 50],
        sigma_values: vec![0.0, 0.001],
        seeds: vec![0, 1],
    };
    let options = SweepOptions {
        jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..SweepOptions::default()
    };
    let output = run_sweep_with(&grid, &options, |_| {})?;
    for r in output.records.iter().filter(|r| r.is_success()).take(8) {
        println!(
            "a_true {:.1} T {:3} n_s {} sigma {:.3}: a* {:.4}, test R² {:+.4} vs SRV {:+.4}",
            r.a_true,
            r.n_times,
            r.n_s,
            r.sigma,
            r.a_star.unwrap_or(f64::NAN),
            r.r2_test_astar.unwrap_or(f64::NAN),
            r.r2_test_srv.unwrap_or(f64::NAN)
        );
    }
    for row in summarize(&output.records)? {
        println!(
            "n_s {:3} sigma {:.3}: {} runs, outperform {:?}, median |a* - a_true| {:?}",
            row.n_s, row.sigma, row.runs, row.outperform_fraction, row.median_abs_a_error
        );
    }
    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        write_sweep(&dir, &grid, &options, &output)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
