use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::json;

use reml::gradient::{dr2_da, fd_r2_gradient, FD_EPS};
use reml::harness::{self, SweepOptions};
use reml::io::{read_trajectory, write_trajectory};
use reml::learner::{learn_a, validation_problem, LearnerConfig};
use reml::synthetic::{synthesize, SweepGrid};

#[derive(Parser)]
#[command(
    name = "reml",
    about = "Elastic metric learning for curve trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic geodesic trajectory as JSON.
    Synthesize {
        #[arg(long = "a-true")]
        a_true: f64,
        #[arg(long = "T")]
        n_times: usize,
        #[arg(long = "ns")]
        n_s: usize,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Learn a* on a trajectory's validation split.
    Fit {
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long = "a-init")]
        a_init: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long = "max-iters")]
        max_iters: Option<usize>,
        #[arg(long = "no-scan")]
        no_scan: bool,
        /// Where to write the (a, R²) history.
        #[arg(long, default_value = "history.csv")]
        history: PathBuf,
        /// Write the train-split regression model at a* as JSON.
        #[arg(long = "dump-model")]
        dump_model: Option<PathBuf>,
        /// Write every curve's F-space image at a* as JSON.
        #[arg(long = "dump-fspace")]
        dump_fspace: Option<PathBuf>,
    },
    /// Compare the analytic dR²/da with central differences.
    Gradcheck {
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = FD_EPS)]
        eps: f64,
    },
    /// Learn a* and report test R² for a* and SRV.
    Compare {
        #[arg(long)]
        trajectory: PathBuf,
    },
    /// Run every cell of a parameter grid.
    Sweep {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also record test R² on a fixed grid of metrics (scans.csv).
        #[arg(long = "scan-dump")]
        scan_dump: bool,
    },
    /// Rebuild summary.csv from a sweep directory.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Synthesize {
            a_true,
            n_times,
            n_s,
            sigma,
            seed,
            out,
        } => {
            let traj = synthesize(a_true, n_times, n_s, sigma, seed)?;
            write_trajectory(&out, &traj)?;
        }
        Command::Fit {
            trajectory,
            a_init,
            step,
            max_iters,
            no_scan,
            history,
            dump_model,
            dump_fspace,
        } => {
            let traj = read_trajectory(&trajectory)?;
            let mut config = LearnerConfig::default();
            if let Some(a) = a_init {
                config.a_init = a;
            }
            if let Some(s) = step {
                config.step_size = s;
            }
            if let Some(n) = max_iters {
                config.max_iters = n;
            }
            config.use_coarse_scan = !no_scan;
            let result = learn_a(&traj, &config)?;
            fs::write(&history, result.history_csv())
                .with_context(|| format!("writing {}", history.display()))?;
            if let Some(path) = dump_model {
                let model = validation_problem(&traj)?.fit_at(result.a_star)?;
                fs::write(path, serde_json::to_string_pretty(&model)?)?;
            }
            if let Some(path) = dump_fspace {
                let points = traj
                    .curves()
                    .iter()
                    .map(|c| reml::transform_curve(c, result.a_star))
                    .collect::<reml::Result<Vec<_>>>()?;
                fs::write(path, serde_json::to_string(&points)?)?;
            }
            println!("{}", serde_json::to_string_pretty(&result)?);
        }
        Command::Gradcheck { trajectory, a, eps } => {
            let traj = read_trajectory(&trajectory)?;
            let problem = validation_problem(&traj)?;
            let report = dr2_da(&problem, a)?;
            let fd = fd_r2_gradient(&problem, a, eps)?;
            let abs_diff = (report.dr2_da - fd).abs();
            let out = json!({
                "report": report,
                "fd_dr2_da": fd,
                "eps": eps,
                "abs_diff": abs_diff,
                "rel_diff": abs_diff / report.dr2_da.abs().max(1.0),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Compare { trajectory } => {
            let traj = read_trajectory(&trajectory)?;
            let cmp = harness::compare(&traj, &LearnerConfig::default())?;
            println!("{}", serde_json::to_string_pretty(&cmp)?);
        }
        Command::Sweep {
            grid,
            jobs,
            out,
            scan_dump,
        } => {
            let text =
                fs::read_to_string(&grid).with_context(|| format!("reading {}", grid.display()))?;
            let grid: SweepGrid = serde_json::from_str(&text)?;
            let options = SweepOptions {
                jobs,
                scan_dump,
                ..SweepOptions::default()
            };
            let output = harness::run_sweep_with(&grid, &options, |r| {
                let status = r.error.as_deref().unwrap_or("ok");
                eprintln!(
                    "a_true={} T={} n_s={} sigma={} seed={}: {status}",
                    r.a_true, r.n_times, r.n_s, r.sigma, r.seed
                );
            })?;
            harness::write_sweep(&out, &grid, &options, &output)?;
        }
        Command::Summarize { input, out } => {
            let records = harness::read_runs_csv(&input.join("runs.csv"))?;
            let rows = harness::summarize(&records)?;
            fs::write(out, harness::summary_csv(&rows)?)?;
        }
    }
    Ok(())
}
