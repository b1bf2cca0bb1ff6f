//! The `F_a` transform: `F_a(c) = ‖c'‖^{1/2} (c'/‖c'‖)^a`, the square-root
//! velocity representation generalized by the stretching parameter `a` (with
//! the bending parameter fixed at `b = 1/2`, where the `2b` prefactor is 1).
//!
//! Straight lines in F-space are geodesics of the elastic metric `g^{a,1/2}`.
//! The complex power is taken through the unwrapped tangent angle, never the
//! principal branch, so the transform stays continuous for non-integer `a`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::curve::{PlanarCurve, VelocityField};
use crate::error::{RemlError, Result};
use crate::vec2::{wrap_angle, Vec2};

/// Samples with a smaller magnitude have no usable angle.
pub const ZERO_SAMPLE: f64 = 1e-12;

/// A curve's image in F-space.
///
/// `lift` is the unwrapped F-space angle of the first sample. It is the one
/// piece of branch information the samples alone cannot carry when `a > 1`:
/// the inverse picks the branch of `arg(samples[0])` closest to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FPoint {
    samples: Vec<Vec2>,
    a: f64,
    ds: f64,
    #[serde(default)]
    lift: f64,
}

impl FPoint {
    pub fn new(samples: Vec<Vec2>, a: f64, ds: f64, lift: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(RemlError::NonPositiveA(a));
        }
        if samples.len() < 2 {
            return Err(RemlError::TooFewPoints {
                needed: 2,
                got: samples.len(),
            });
        }
        if let Some(index) = samples.iter().position(|s| !s.is_finite()) {
            return Err(RemlError::NonFiniteCoordinate { index });
        }
        Ok(FPoint {
            samples,
            a,
            ds,
            lift,
        })
    }

    pub fn samples(&self) -> &[Vec2] {
        &self.samples
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }

    pub fn lift(&self) -> f64 {
        self.lift
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Checks that `other` lives in the same F-space as `self`.
    pub fn check_compatible(&self, other: &FPoint) -> Result<()> {
        if self.len() != other.len() {
            return Err(RemlError::ShapeMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        if self.a != other.a {
            return Err(RemlError::MetricMismatch {
                left: self.a,
                right: other.a,
            });
        }
        Ok(())
    }

    /// `Σ w_i q_i` over points sharing one F-space. The lift is combined with
    /// the same weights.
    pub fn linear_combination(terms: &[(f64, &FPoint)]) -> Result<FPoint> {
        let (_, first) = terms.first().ok_or(RemlError::EmptyInput)?;
        let mut samples = vec![Vec2::ZERO; first.len()];
        let mut lift = 0.0;
        for &(w, q) in terms {
            first.check_compatible(q)?;
            for (acc, &s) in samples.iter_mut().zip(&q.samples) {
                *acc += s * w;
            }
            lift += w * q.lift;
        }
        FPoint::new(samples, first.a, first.ds, lift)
    }
}

/// `samples[k] = ‖c'_k‖^{1/2} (cos aθ_k, sin aθ_k)` with unwrapped `θ_k`.
pub fn f_forward(velocity: &VelocityField, a: f64) -> Result<FPoint> {
    if !(a > 0.0) {
        return Err(RemlError::NonPositiveA(a));
    }
    let samples = velocity
        .magnitudes()
        .iter()
        .zip(velocity.angles())
        .map(|(&m, &theta)| Vec2::from_polar(m.sqrt(), a * theta))
        .collect();
    let lift = a * velocity.angles()[0];
    FPoint::new(samples, a, velocity.ds(), lift)
}

/// Reconstructs a curve from its F-space image, starting at `base_point`.
///
/// Speeds are `|q_k|²` and tangent angles are the unwrapped sample angles
/// divided by `a`. For `a > 1` this inverts [`f_forward`] only when consecutive
/// tangent angles differ by less than `π / a`, since larger turns alias in
/// F-space. The result is flagged open; use [`PlanarCurve::new`] on its points
/// to attach a different flag.
pub fn f_inverse(q: &FPoint, base_point: Vec2) -> Result<PlanarCurve> {
    if let Some(index) = q.samples.iter().position(|s| s.norm() < ZERO_SAMPLE) {
        return Err(RemlError::ZeroSample { index });
    }
    let a = q.a;
    let first = q.samples[0].angle();
    let mut psi = first + TAU * ((q.lift - first) / TAU).round();
    let mut prev_raw = first;

    let mut points = Vec::with_capacity(q.len() + 1);
    let mut point = base_point;
    points.push(point);
    for (k, s) in q.samples.iter().enumerate() {
        let raw = s.angle();
        if k > 0 {
            psi += wrap_angle(raw - prev_raw);
            prev_raw = raw;
        }
        let speed = s.norm_sq();
        point += Vec2::from_polar(speed, psi / a) * q.ds;
        points.push(point);
    }
    PlanarCurve::new(points, false)
}

/// Δs-weighted L² distance `sqrt(Σ_k ‖q1[k] - q2[k]‖² Δs)`.
pub fn f_distance(q1: &FPoint, q2: &FPoint) -> Result<f64> {
    q1.check_compatible(q2)?;
    Ok(squared_distance(q1.samples(), q2.samples(), q1.ds).sqrt())
}

pub(crate) fn squared_distance(x: &[Vec2], y: &[Vec2], ds: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&p, &q)| (p - q).norm_sq())
        .sum::<f64>()
        * ds
}

/// Convenience: `F_a` of a curve.
pub fn transform_curve(curve: &PlanarCurve, a: f64) -> Result<FPoint> {
    f_forward(&crate::curve::derivative(curve)?, a)
}
