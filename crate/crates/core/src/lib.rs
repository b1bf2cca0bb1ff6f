//! Regression-based elastic metric learning for trajectories of planar curves.
//!
//! Curves are mapped to a flat space by the `F_a` transform, where geodesic
//! regression under the elastic metric `g^{a,1/2}` becomes linear regression.
//! The stretching parameter `a` is then chosen by gradient ascent on the
//! validation R² of that regression, and compared against the square-root
//! velocity (SRV) metric `a = 1`.
//!
//! Module map:
//! - [`curve`]: planar curves, discrete velocity, the elastic inner product
//! - [`ftransform`]: forward and inverse `F_a`, F-space distance
//! - [`regression`]: closed-form normal equations, MSE, VAR, R²
//! - [`gradient`]: analytic `dR²/da` and its finite-difference check
//! - [`learner`]: gradient ascent with backtracking
//! - [`synthetic`]: geodesic trajectories, noise, splits, sweep grids
//! - [`harness`]: runs, sweeps, summaries and their CSV outputs

// `!(x > 0.0)` style guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod error;
pub mod ftransform;
pub mod gradient;
pub mod harness;
pub mod io;
pub mod learner;
pub mod regression;
pub mod synthetic;
pub mod vec2;

pub use curve::{
    derivative, elastic_inner_product, validate_and_normalize, PlanarCurve, VelocityField,
};
pub use error::{RemlError, Result};
pub use ftransform::{f_distance, f_forward, f_inverse, transform_curve, FPoint};
pub use gradient::{
    df_da, dmse_da, dr2_da, dvar_da, fd_r2_gradient, GradientReport, RegressionProblem,
};
pub use harness::{run_single, run_sweep, summarize, RunRecord};
pub use learner::{learn_a, LearnResult, LearnerConfig};
pub use regression::{fit, mse, predict, r_squared, variance, RegressionModel, TimeDesign};
pub use synthetic::{add_noise, endpoint_shapes, geodesic_between, split, SweepGrid, Trajectory};
pub use vec2::Vec2;
