//! Analytic derivative of validation R² with respect to the stretching
//! parameter `a`, and a central finite-difference check of it.
//!
//! In polar form `F_a = ‖c'‖^{1/2} e^{i a θ}`, so
//! `dF_a/da = ‖c'‖^{1/2} θ e^{i(π/2 + a θ)}`: each sample rotated by 90° and
//! scaled by its tangent angle. The regression weights τ depend only on time,
//! so residual derivatives are the same linear combinations of `dF/da`.

use serde::{Deserialize, Serialize};

use crate::curve::VelocityField;
use crate::error::{RemlError, Result};
use crate::ftransform::{f_forward, FPoint};
use crate::regression::{check_variance, fit, r_squared, RegressionModel, TimeDesign};
use crate::vec2::Vec2;

/// Default central-difference step.
pub const FD_EPS: f64 = 1e-6;

/// Train and evaluation curves (as velocity fields) with their times: everything
/// needed to evaluate R²(a) and its derivative at any `a`.
#[derive(Debug, Clone)]
pub struct RegressionProblem {
    train: Vec<VelocityField>,
    design: TimeDesign,
    eval: Vec<VelocityField>,
    eval_times: Vec<f64>,
}

impl RegressionProblem {
    pub fn new(
        train: Vec<VelocityField>,
        train_times: Vec<f64>,
        eval: Vec<VelocityField>,
        eval_times: Vec<f64>,
    ) -> Result<Self> {
        if train.len() != train_times.len() {
            return Err(RemlError::ShapeMismatch {
                expected: train.len(),
                got: train_times.len(),
            });
        }
        if eval.len() != eval_times.len() {
            return Err(RemlError::ShapeMismatch {
                expected: eval.len(),
                got: eval_times.len(),
            });
        }
        if eval.len() < 2 {
            return Err(RemlError::TooFewPoints {
                needed: 2,
                got: eval.len(),
            });
        }
        let n = train.first().map(VelocityField::len).unwrap_or(0);
        if let Some(v) = train.iter().chain(&eval).find(|v| v.len() != n) {
            return Err(RemlError::ShapeMismatch {
                expected: n,
                got: v.len(),
            });
        }
        let design = TimeDesign::new(train_times)?;
        Ok(RegressionProblem {
            train,
            design,
            eval,
            eval_times,
        })
    }

    pub fn design(&self) -> &TimeDesign {
        &self.design
    }

    pub fn train(&self) -> &[VelocityField] {
        &self.train
    }

    pub fn eval(&self) -> &[VelocityField] {
        &self.eval
    }

    pub fn eval_times(&self) -> &[f64] {
        &self.eval_times
    }

    pub fn transform_train(&self, a: f64) -> Result<Vec<FPoint>> {
        self.train.iter().map(|v| f_forward(v, a)).collect()
    }

    pub fn transform_eval(&self, a: f64) -> Result<Vec<FPoint>> {
        self.eval.iter().map(|v| f_forward(v, a)).collect()
    }

    pub fn fit_at(&self, a: f64) -> Result<RegressionModel> {
        fit(&self.transform_train(a)?, &self.design)
    }

    /// Refit on the train curves under `a` and score the evaluation curves.
    pub fn r_squared_at(&self, a: f64) -> Result<f64> {
        let model = self.fit_at(a)?;
        r_squared(&model, &self.transform_eval(a)?, &self.eval_times)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    pub a: f64,
    pub r2: f64,
    pub dr2_da: f64,
    pub mse: f64,
    pub var: f64,
    pub dmse_da: f64,
    pub dvar_da: f64,
}

/// Per-sample `dF_a/da`.
pub fn df_da(velocity: &VelocityField, a: f64) -> Result<Vec<Vec2>> {
    if !(a > 0.0) {
        return Err(RemlError::NonPositiveA(a));
    }
    Ok(velocity
        .magnitudes()
        .iter()
        .zip(velocity.angles())
        .map(|(&m, &theta)| {
            Vec2::from_polar(m.sqrt() * theta, std::f64::consts::FRAC_PI_2 + a * theta)
        })
        .collect())
}

fn weighted_sum(weights: &[f64], fields: &[Vec<Vec2>]) -> Vec<Vec2> {
    let mut out = vec![Vec2::ZERO; fields[0].len()];
    for (&w, f) in weights.iter().zip(fields) {
        for (o, &s) in out.iter_mut().zip(f) {
            *o += s * w;
        }
    }
    out
}

fn samples_of(points: &[FPoint]) -> Vec<Vec<Vec2>> {
    points.iter().map(|q| q.samples().to_vec()).collect()
}

fn derivatives(fields: &[VelocityField], a: f64) -> Result<Vec<Vec<Vec2>>> {
    fields.iter().map(|v| df_da(v, a)).collect()
}

fn mse_parts(problem: &RegressionProblem, a: f64) -> Result<(f64, f64)> {
    let ds = problem.train[0].ds();
    let (tau0, tau1) = problem.design.taus();
    let train_f = samples_of(&problem.transform_train(a)?);
    let train_d = derivatives(&problem.train, a)?;
    let b0 = weighted_sum(&tau0, &train_f);
    let b1 = weighted_sum(&tau1, &train_f);
    let db0 = weighted_sum(&tau0, &train_d);
    let db1 = weighted_sum(&tau1, &train_d);

    let mut value = 0.0;
    let mut slope = 0.0;
    for (v, &t) in problem.eval.iter().zip(&problem.eval_times) {
        let q = f_forward(v, a)?;
        let dq = df_da(v, a)?;
        for k in 0..q.len() {
            let r = q.samples()[k] - b0[k] - b1[k] * t;
            let dr = dq[k] - db0[k] - db1[k] * t;
            value += r.norm_sq();
            slope += dr.dot(r);
        }
    }
    Ok((value * ds, 2.0 * slope * ds))
}

/// `d MSE / da = 2 Σ_i Σ_k (dr_i/da)·r_i Δs` with the derivative flowing
/// through both the evaluation curve and the train curves inside `β̂`.
pub fn dmse_da(problem: &RegressionProblem, a: f64) -> Result<f64> {
    Ok(mse_parts(problem, a)?.1)
}

fn var_parts(eval: &[VelocityField], a: f64) -> Result<(f64, f64)> {
    if eval.len() < 2 {
        return Err(RemlError::TooFewPoints {
            needed: 2,
            got: eval.len(),
        });
    }
    let n = eval.len() as f64;
    let ds = eval[0].ds();
    let f = samples_of(
        &eval
            .iter()
            .map(|v| f_forward(v, a))
            .collect::<Result<Vec<_>>>()?,
    );
    let d = derivatives(eval, a)?;
    let uniform = vec![1.0 / n; eval.len()];
    let f_mean = weighted_sum(&uniform, &f);
    let d_mean = weighted_sum(&uniform, &d);
    let mut value = 0.0;
    let mut slope = 0.0;
    for (fi, di) in f.iter().zip(&d) {
        for k in 0..fi.len() {
            let r = fi[k] - f_mean[k];
            let dr = di[k] - d_mean[k];
            value += r.norm_sq();
            slope += dr.dot(r);
        }
    }
    Ok((value * ds, 2.0 * slope * ds))
}

pub fn dvar_da(eval: &[VelocityField], a: f64) -> Result<f64> {
    Ok(var_parts(eval, a)?.1)
}

/// Quotient rule: `dR²/da = -(MSE' VAR - MSE VAR') / VAR²`.
pub fn dr2_da(problem: &RegressionProblem, a: f64) -> Result<GradientReport> {
    if !(a > 0.0) {
        return Err(RemlError::NonPositiveA(a));
    }
    let (mse, dmse) = mse_parts(problem, a)?;
    let (var, dvar) = var_parts(&problem.eval, a)?;
    // ‖F_a(c)‖² is the length of c for every a
    let energy: f64 = problem
        .eval
        .iter()
        .map(|v| v.magnitudes().iter().sum::<f64>() * v.ds())
        .sum();
    check_variance(var, energy)?;
    Ok(GradientReport {
        a,
        r2: 1.0 - mse / var,
        dr2_da: -(dmse * var - mse * dvar) / (var * var),
        mse,
        var,
        dmse_da: dmse,
        dvar_da: dvar,
    })
}

/// Central difference of R² over `a`, rerunning transform, fit and scoring at
/// `a ± eps`.
pub fn fd_r2_gradient(problem: &RegressionProblem, a: f64, eps: f64) -> Result<f64> {
    if !(a - eps > 0.0) {
        return Err(RemlError::NonPositiveA(a - eps));
    }
    let plus = problem.r_squared_at(a + eps)?;
    let minus = problem.r_squared_at(a - eps)?;
    Ok((plus - minus) / (2.0 * eps))
}
