//! Geodesic regression carried out as ordinary linear regression in F-space.
//!
//! With design matrix rows `(1, t_i)` the normal equations have the closed
//! form `β̂_0 = Σ_i τ_{i0} q_i`, `β̂_1 = Σ_i τ_{i1} q_i`, where, writing
//! `S1 = Σ t_i`, `S2 = Σ t_i²` over the `n` training times,
//!
//! ```text
//! τ_{i0} = (S2 - S1 t_i) / (n S2 - S1²)
//! τ_{i1} = (n t_i - S1) / (n S2 - S1²)
//! ```
//!
//! Norms are the Δs-weighted Riemann sums used throughout the crate, so MSE,
//! VAR and R² are computed with one consistent inner product.

use serde::{Deserialize, Serialize};

use crate::error::{RemlError, Result};
use crate::ftransform::{squared_distance, FPoint};
use crate::vec2::Vec2;

/// Training times with their sums `S1 = Σ t_i` and `S2 = Σ t_i²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeDesign {
    times: Vec<f64>,
    tbar: f64,
    tbar2: f64,
    n_train: usize,
}

impl TimeDesign {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        let n_train = times.len();
        if n_train < 2 {
            return Err(RemlError::TooFewPoints {
                needed: 2,
                got: n_train,
            });
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(RemlError::InvalidConfig("non-finite time".into()));
        }
        let tbar: f64 = times.iter().sum();
        let tbar2: f64 = times.iter().map(|t| t * t).sum();
        let det = n_train as f64 * tbar2 - tbar * tbar;
        if !(det > 1e-14 * (n_train as f64 * tbar2).max(f64::MIN_POSITIVE)) {
            return Err(RemlError::SingularDesign);
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RemlError::InvalidConfig(
                "regression times must be strictly increasing".into(),
            ));
        }
        Ok(TimeDesign {
            times,
            tbar,
            tbar2,
            n_train,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    /// `Σ t_i` (a sum, not a mean).
    pub fn tbar(&self) -> f64 {
        self.tbar
    }

    /// `Σ t_i²`.
    pub fn tbar2(&self) -> f64 {
        self.tbar2
    }

    fn determinant(&self) -> f64 {
        self.n_train as f64 * self.tbar2 - self.tbar * self.tbar
    }

    /// Intercept and slope weights `(τ_{i0}, τ_{i1})` for every training index.
    pub fn taus(&self) -> (Vec<f64>, Vec<f64>) {
        let det = self.determinant();
        let n = self.n_train as f64;
        let tau0 = self
            .times
            .iter()
            .map(|&t| (self.tbar2 - self.tbar * t) / det)
            .collect();
        let tau1 = self
            .times
            .iter()
            .map(|&t| (n * t - self.tbar) / det)
            .collect();
        (tau0, tau1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    beta0: FPoint,
    beta1: FPoint,
    a: f64,
    tau0: Vec<f64>,
    tau1: Vec<f64>,
}

impl RegressionModel {
    pub fn beta0(&self) -> &FPoint {
        &self.beta0
    }

    pub fn beta1(&self) -> &FPoint {
        &self.beta1
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn tau0(&self) -> &[f64] {
        &self.tau0
    }

    pub fn tau1(&self) -> &[f64] {
        &self.tau1
    }

    /// Weights `τ_{ij} = τ_{j0} + τ_{j1} t` expressing the prediction at `t`
    /// as a combination of the training points.
    pub fn prediction_weights(&self, t: f64) -> Vec<f64> {
        self.tau0
            .iter()
            .zip(&self.tau1)
            .map(|(&t0, &t1)| t0 + t1 * t)
            .collect()
    }
}

fn check_same_space(points: &[FPoint]) -> Result<()> {
    if let Some(first) = points.first() {
        for q in &points[1..] {
            first.check_compatible(q)?;
        }
    }
    Ok(())
}

pub fn fit(train: &[FPoint], design: &TimeDesign) -> Result<RegressionModel> {
    if train.len() != design.n_train() {
        return Err(RemlError::ShapeMismatch {
            expected: design.n_train(),
            got: train.len(),
        });
    }
    check_same_space(train)?;
    let (tau0, tau1) = design.taus();
    let terms0: Vec<(f64, &FPoint)> = tau0.iter().copied().zip(train).collect();
    let terms1: Vec<(f64, &FPoint)> = tau1.iter().copied().zip(train).collect();
    let beta0 = FPoint::linear_combination(&terms0)?;
    let beta1 = FPoint::linear_combination(&terms1)?;
    Ok(RegressionModel {
        a: beta0.a(),
        beta0,
        beta1,
        tau0,
        tau1,
    })
}

/// `β̂_0 + t β̂_1`.
pub fn predict(model: &RegressionModel, t: f64) -> FPoint {
    FPoint::linear_combination(&[(1.0, &model.beta0), (t, &model.beta1)])
        .expect("model coefficients share one F-space")
}

fn check_eval(model: &RegressionModel, eval: &[FPoint], times: &[f64]) -> Result<()> {
    if eval.len() != times.len() {
        return Err(RemlError::ShapeMismatch {
            expected: eval.len(),
            got: times.len(),
        });
    }
    for q in eval {
        model.beta0.check_compatible(q)?;
    }
    Ok(())
}

/// Un-normalized residual sum `Σ_i Σ_k ‖q_i[k] - (β̂_0 + t_i β̂_1)[k]‖² Δs`.
pub fn mse(model: &RegressionModel, eval: &[FPoint], times: &[f64]) -> Result<f64> {
    check_eval(model, eval, times)?;
    let b0 = model.beta0.samples();
    let b1 = model.beta1.samples();
    let ds = model.beta0.ds();
    let total = eval
        .iter()
        .zip(times)
        .map(|(q, &t)| {
            q.samples()
                .iter()
                .enumerate()
                .map(|(k, &s)| (s - (b0[k] + b1[k] * t)).norm_sq())
                .sum::<f64>()
        })
        .sum::<f64>();
    Ok(total * ds)
}

pub(crate) fn mean_samples(points: &[FPoint]) -> Vec<Vec2> {
    let n = points.len() as f64;
    let mut mean = vec![Vec2::ZERO; points[0].len()];
    for q in points {
        for (m, &s) in mean.iter_mut().zip(q.samples()) {
            *m += s;
        }
    }
    mean.iter_mut().for_each(|m| *m = *m / n);
    mean
}

/// Un-normalized spread about the mean of the evaluation set itself.
pub fn variance(eval: &[FPoint]) -> Result<f64> {
    if eval.len() < 2 {
        return Err(RemlError::TooFewPoints {
            needed: 2,
            got: eval.len(),
        });
    }
    check_same_space(eval)?;
    let mean = mean_samples(eval);
    let ds = eval[0].ds();
    Ok(eval
        .iter()
        .map(|q| squared_distance(q.samples(), &mean, ds))
        .sum())
}

/// Variances at or below this fraction of the evaluation set's energy
/// `Σ_i ‖q_i‖²` are round-off from identical curves.
const VARIANCE_FLOOR: f64 = 1e-24;

pub(crate) fn check_variance(var: f64, energy: f64) -> Result<()> {
    if var > VARIANCE_FLOOR * energy {
        Ok(())
    } else {
        Err(RemlError::ZeroVariance)
    }
}

/// `1 - MSE / VAR`; negative when the fit is worse than the evaluation mean.
pub fn r_squared(model: &RegressionModel, eval: &[FPoint], times: &[f64]) -> Result<f64> {
    let err = mse(model, eval, times)?;
    let var = variance(eval)?;
    let energy: f64 = eval
        .iter()
        .map(|q| q.samples().iter().map(|s| s.norm_sq()).sum::<f64>() * q.ds())
        .sum();
    check_variance(var, energy)?;
    Ok(1.0 - err / var)
}
