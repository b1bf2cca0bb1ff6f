//! Gradient ascent on validation R² over the stretching parameter `a`.

use serde::{Deserialize, Serialize};

use crate::curve::{derivative, VelocityField};
use crate::error::{RemlError, Result};
use crate::gradient::{dr2_da, RegressionProblem};
use crate::synthetic::Trajectory;

/// Maximum number of step halvings before the ascent is declared converged.
pub const MAX_HALVINGS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnerConfig {
    pub a_init: f64,
    pub step_size: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub use_coarse_scan: bool,
    pub scan_grid: Vec<f64>,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            a_init: 1.0,
            step_size: 0.1,
            max_iters: 500,
            grad_tol: 1e-6,
            a_min: 0.05,
            a_max: 5.0,
            use_coarse_scan: true,
            // 0.1, 0.2, ..., 2.0 computed exactly as i / 10
            scan_grid: (1..=20).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.a_min && self.a_min < self.a_max) {
            return Err(RemlError::InvalidConfig(format!(
                "need 0 < a_min < a_max, got [{}, {}]",
                self.a_min, self.a_max
            )));
        }
        if !(self.step_size > 0.0) {
            return Err(RemlError::InvalidConfig(
                "step_size must be positive".into(),
            ));
        }
        if self.max_iters < 1 {
            return Err(RemlError::InvalidConfig("max_iters must be >= 1".into()));
        }
        if self.use_coarse_scan && self.scan_grid.is_empty() {
            return Err(RemlError::InvalidConfig("scan grid is empty".into()));
        }
        Ok(())
    }

    fn clamp(&self, a: f64) -> f64 {
        a.clamp(self.a_min, self.a_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnResult {
    pub a_star: f64,
    /// Accepted `(a, R²_val)` iterates; the last entry is at `a_star`.
    pub r2_val_history: Vec<(f64, f64)>,
    pub converged: bool,
    pub iterations: usize,
}

impl LearnResult {
    pub fn final_r2(&self) -> f64 {
        self.r2_val_history
            .last()
            .map(|&(_, r2)| r2)
            .unwrap_or(f64::NAN)
    }

    /// `a,r2` rows for plotting.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("iteration,a,r2_val\n");
        for (i, (a, r2)) in self.r2_val_history.iter().enumerate() {
            out.push_str(&format!("{i},{a},{r2}\n"));
        }
        out
    }
}

/// Outcome of one ascent step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    /// Moved to `a` with objective value `r2`.
    Accepted { a: f64, r2: f64 },
    /// No halving of the step improved the objective.
    Stalled,
}

/// Plain clamped ascent proposal `clamp(a + step * gradient)`.
pub fn propose(gradient: f64, current_a: f64, step: f64, config: &LearnerConfig) -> f64 {
    config.clamp(current_a + step * gradient)
}

/// One backtracking ascent step: propose with the configured step size and
/// halve it until `objective` does not decrease, at most [`MAX_HALVINGS`] times.
pub fn step_policy<F>(
    gradient: f64,
    current_a: f64,
    current_r2: f64,
    config: &LearnerConfig,
    mut objective: F,
) -> Result<Step>
where
    F: FnMut(f64) -> Result<f64>,
{
    if gradient == 0.0 {
        return Ok(Step::Accepted {
            a: current_a,
            r2: current_r2,
        });
    }
    let mut step = config.step_size;
    for _ in 0..=MAX_HALVINGS {
        let next = propose(gradient, current_a, step, config);
        if next == current_a {
            return Ok(Step::Stalled);
        }
        let r2 = objective(next)?;
        if r2 >= current_r2 {
            return Ok(Step::Accepted { a: next, r2 });
        }
        step *= 0.5;
    }
    Ok(Step::Stalled)
}

fn velocities(traj: &Trajectory, range: std::ops::Range<usize>) -> Result<Vec<VelocityField>> {
    traj.curves()[range].iter().map(derivative).collect()
}

/// Train split against the validation split.
pub fn validation_problem(traj: &Trajectory) -> Result<RegressionProblem> {
    problem_for(traj, traj.validation_range(), "validation")
}

/// Train split against the test split.
pub fn test_problem(traj: &Trajectory) -> Result<RegressionProblem> {
    problem_for(traj, traj.test_range(), "test")
}

fn problem_for(
    traj: &Trajectory,
    eval: std::ops::Range<usize>,
    name: &str,
) -> Result<RegressionProblem> {
    let train = traj.train_range();
    if train.len() < 2 {
        return Err(RemlError::DegenerateSplit(format!(
            "need at least 2 train curves, got {}",
            train.len()
        )));
    }
    if eval.len() < 2 {
        return Err(RemlError::DegenerateSplit(format!(
            "need at least 2 {name} curves, got {}",
            eval.len()
        )));
    }
    RegressionProblem::new(
        velocities(traj, train.clone())?,
        traj.times()[train].to_vec(),
        velocities(traj, eval.clone())?,
        traj.times()[eval].to_vec(),
    )
}

/// Index of the largest value; the first one wins ties.
fn argmax(values: &[(f64, f64)]) -> (f64, f64) {
    values
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        })
}

pub fn learn_a(traj: &Trajectory, config: &LearnerConfig) -> Result<LearnResult> {
    let problem = validation_problem(traj)?;
    learn_on(&problem, config)
}

/// The ascent itself, on an already assembled train/validation problem.
pub fn learn_on(problem: &RegressionProblem, config: &LearnerConfig) -> Result<LearnResult> {
    config.validate()?;
    let (mut a, mut r2) = if config.use_coarse_scan {
        let scan = config
            .scan_grid
            .iter()
            .map(|&a| {
                let a = config.clamp(a);
                problem.r_squared_at(a).map(|r2| (a, r2))
            })
            .collect::<Result<Vec<_>>>()?;
        argmax(&scan)
    } else {
        let a = config.clamp(config.a_init);
        (a, problem.r_squared_at(a)?)
    };

    let mut history = vec![(a, r2)];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iters {
        iterations += 1;
        let report = dr2_da(problem, a)?;
        if report.dr2_da.abs() < config.grad_tol {
            converged = true;
            break;
        }
        match step_policy(report.dr2_da, a, r2, config, |x| problem.r_squared_at(x))? {
            Step::Accepted {
                a: next,
                r2: next_r2,
            } => {
                a = next;
                r2 = next_r2;
                history.push((a, r2));
            }
            Step::Stalled => {
                converged = true;
                break;
            }
        }
    }
    Ok(LearnResult {
        a_star: a,
        r2_val_history: history,
        converged,
        iterations,
    })
}
