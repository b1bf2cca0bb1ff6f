//! Experiment orchestration: one run per grid cell (synthesize, split, learn
//! `a*`, compare against SRV on the test split), sweeps over a grid, and the
//! per-(n_s, σ) summary table.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{RemlError, Result};
use crate::learner::{learn_a, test_problem, LearnResult, LearnerConfig};
use crate::synthetic::{GridCell, SweepGrid, Trajectory};

/// The SRV metric.
pub const SRV_A: f64 = 1.0;

/// One grid cell's outcome. Failed runs keep their parameters and carry the
/// error message instead of results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub a_true: f64,
    #[serde(rename = "T")]
    pub n_times: usize,
    pub n_s: usize,
    pub sigma: f64,
    pub seed: u64,
    pub a_star: Option<f64>,
    pub abs_a_error: Option<f64>,
    pub r2_test_astar: Option<f64>,
    pub r2_test_srv: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub error: Option<String>,
    /// Not written to `runs.csv`, which must be reproducible byte for byte.
    #[serde(skip)]
    pub wall_time_ms: u64,
}

impl RunRecord {
    fn failed(cell: &GridCell, err: &RemlError, wall_time_ms: u64) -> Self {
        RunRecord {
            a_true: cell.a_true,
            n_times: cell.n_times,
            n_s: cell.n_s,
            sigma: cell.sigma,
            seed: cell.seed,
            a_star: None,
            abs_a_error: None,
            r2_test_astar: None,
            r2_test_srv: None,
            iterations: None,
            converged: None,
            error: Some(err.to_string()),
            wall_time_ms,
        }
    }

    pub fn is_success(&self) -> bool {
        self.error.is_none()
    }

    pub fn cell(&self) -> GridCell {
        GridCell {
            a_true: self.a_true,
            n_times: self.n_times,
            n_s: self.n_s,
            sigma: self.sigma,
            seed: self.seed,
        }
    }

    /// `r2_test(a*) >= r2_test(SRV)`; `None` for failed runs.
    pub fn outperforms_srv(&self) -> Option<bool> {
        Some(self.r2_test_astar? >= self.r2_test_srv?)
    }
}

/// Test-split R² after refitting the train split under metric `a`.
pub fn test_r2(traj: &Trajectory, a: f64) -> Result<f64> {
    test_problem(traj)?.r_squared_at(a)
}

/// Learned metric against SRV on one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub learn: LearnResult,
    pub r2_test_astar: f64,
    pub r2_test_srv: f64,
}

pub fn compare(traj: &Trajectory, config: &LearnerConfig) -> Result<Comparison> {
    let learn = learn_a(traj, config)?;
    let problem = test_problem(traj)?;
    Ok(Comparison {
        r2_test_astar: problem.r_squared_at(learn.a_star)?,
        r2_test_srv: problem.r_squared_at(SRV_A)?,
        learn,
    })
}

pub fn run_single(cell: &GridCell, config: &LearnerConfig) -> RunRecord {
    let start = Instant::now();
    let outcome = cell.synthesize().and_then(|traj| compare(&traj, config));
    let wall_time_ms = start.elapsed().as_millis() as u64;
    match outcome {
        Ok(cmp) => RunRecord {
            a_true: cell.a_true,
            n_times: cell.n_times,
            n_s: cell.n_s,
            sigma: cell.sigma,
            seed: cell.seed,
            a_star: Some(cmp.learn.a_star),
            abs_a_error: Some((cmp.learn.a_star - cell.a_true).abs()),
            r2_test_astar: Some(cmp.r2_test_astar),
            r2_test_srv: Some(cmp.r2_test_srv),
            iterations: Some(cmp.learn.iterations),
            converged: Some(cmp.learn.converged),
            error: None,
            wall_time_ms,
        },
        Err(e) => RunRecord::failed(cell, &e, wall_time_ms),
    }
}

/// Test-split R² of one run's trajectory on a fixed grid of metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub a_true: f64,
    #[serde(rename = "T")]
    pub n_times: usize,
    pub n_s: usize,
    pub sigma: f64,
    pub seed: u64,
    pub a: f64,
    pub r2_test: f64,
}

/// Metrics used for `--scan-dump`: 0.05, 0.10, ..., 2.00 (contains 1.0 exactly).
pub fn scan_dump_grid() -> Vec<f64> {
    (1..=40).map(|i| i as f64 / 20.0).collect()
}

fn scan_cell(cell: &GridCell) -> Vec<ScanRow> {
    let Ok(traj) = cell.synthesize() else {
        return Vec::new();
    };
    let Ok(problem) = test_problem(&traj) else {
        return Vec::new();
    };
    scan_dump_grid()
        .into_iter()
        .filter_map(|a| {
            problem.r_squared_at(a).ok().map(|r2_test| ScanRow {
                a_true: cell.a_true,
                n_times: cell.n_times,
                n_s: cell.n_s,
                sigma: cell.sigma,
                seed: cell.seed,
                a,
                r2_test,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub jobs: usize,
    pub learner: LearnerConfig,
    pub scan_dump: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            jobs: 1,
            learner: LearnerConfig::default(),
            scan_dump: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub records: Vec<RunRecord>,
    pub scans: Vec<ScanRow>,
}

/// Runs every grid cell with `parallelism` workers. Records come back sorted by
/// parameters regardless of completion order.
pub fn run_sweep(grid: &SweepGrid, parallelism: usize) -> Result<Vec<RunRecord>> {
    let options = SweepOptions {
        jobs: parallelism,
        ..SweepOptions::default()
    };
    Ok(run_sweep_with(grid, &options, |_| {})?.records)
}

/// As [`run_sweep`]; `on_record` sees each record as soon as it completes.
pub fn run_sweep_with<F>(
    grid: &SweepGrid,
    options: &SweepOptions,
    on_record: F,
) -> Result<SweepOutput>
where
    F: Fn(&RunRecord) + Sync,
{
    grid.validate()?;
    options.learner.validate()?;
    let cells = grid.cells();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.max(1))
        .build()
        .map_err(|e| RemlError::InvalidConfig(e.to_string()))?;
    let results: Vec<(RunRecord, Vec<ScanRow>)> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let record = run_single(cell, &options.learner);
                on_record(&record);
                let scans = if options.scan_dump {
                    scan_cell(cell)
                } else {
                    Vec::new()
                };
                (record, scans)
            })
            .collect()
    });
    let mut out = SweepOutput::default();
    for (record, scans) in results {
        out.records.push(record);
        out.scans.extend(scans);
    }
    Ok(out)
}

/// One row of the per-(n_s, σ) heatmap table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n_s: usize,
    pub sigma: f64,
    pub runs: usize,
    pub failed: usize,
    /// Among successful runs, share with `r2_test(a*) >= r2_test(SRV)`.
    pub outperform_fraction: Option<f64>,
    pub median_abs_a_error: Option<f64>,
}

fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// Share of successful runs where the learned metric beats or ties SRV.
pub fn outperformance_fraction<'a, I>(records: I) -> Option<f64>
where
    I: IntoIterator<Item = &'a RunRecord>,
{
    let flags: Vec<bool> = records
        .into_iter()
        .filter_map(RunRecord::outperforms_srv)
        .collect();
    if flags.is_empty() {
        None
    } else {
        Some(flags.iter().filter(|&&b| b).count() as f64 / flags.len() as f64)
    }
}

pub fn summarize(records: &[RunRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(RemlError::EmptyInput);
    }
    let mut keys: Vec<(usize, f64)> = records.iter().map(|r| (r.n_s, r.sigma)).collect();
    keys.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
    keys.dedup();
    Ok(keys
        .into_iter()
        .map(|(n_s, sigma)| {
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.n_s == n_s && r.sigma == sigma)
                .collect();
            SummaryRow {
                n_s,
                sigma,
                runs: group.len(),
                failed: group.iter().filter(|r| !r.is_success()).count(),
                outperform_fraction: outperformance_fraction(group.iter().copied()),
                median_abs_a_error: median(group.iter().filter_map(|r| r.abs_a_error).collect()),
            }
        })
        .collect())
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| RemlError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| RemlError::Parse(e.to_string()))
}

pub fn runs_csv(records: &[RunRecord]) -> Result<String> {
    to_csv(records)
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<String> {
    to_csv(rows)
}

pub fn scans_csv(rows: &[ScanRow]) -> Result<String> {
    to_csv(rows)
}

pub fn timings_csv(records: &[RunRecord]) -> String {
    let mut out = String::from("a_true,T,n_s,sigma,seed,wall_time_ms\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.a_true, r.n_times, r.n_s, r.sigma, r.seed, r.wall_time_ms
        ));
    }
    out
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    reader
        .deserialize()
        .map(|row| row.map_err(RemlError::from))
        .collect()
}

#[derive(Serialize)]
struct SweepConfigFile<'a> {
    grid: &'a SweepGrid,
    learner: &'a LearnerConfig,
    jobs: usize,
    scan_dump: bool,
}

/// Writes `runs.csv`, `summary.csv`, `config.json`, `timings.csv` and, when
/// scans were collected, `scans.csv` into `dir`.
pub fn write_sweep(
    dir: &Path,
    grid: &SweepGrid,
    options: &SweepOptions,
    output: &SweepOutput,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("runs.csv"), runs_csv(&output.records)?)?;
    if !output.records.is_empty() {
        fs::write(
            dir.join("summary.csv"),
            summary_csv(&summarize(&output.records)?)?,
        )?;
    }
    let config = SweepConfigFile {
        grid,
        learner: &options.learner,
        jobs: options.jobs,
        scan_dump: options.scan_dump,
    };
    fs::write(
        dir.join("config.json"),
        serde_json::to_string_pretty(&config)?,
    )?;
    fs::write(dir.join("timings.csv"), timings_csv(&output.records))?;
    if options.scan_dump {
        fs::write(dir.join("scans.csv"), scans_csv(&output.scans)?)?;
    }
    Ok(())
}
