//! Discrete planar curves, their discrete velocity, and the elastic inner product.
//!
//! A curve with `n_s` samples is treated as a function on the parameter domain
//! `[0, 1]` with uniform spacing `Δs = 1 / (n_s - 1)`. Velocities are forward
//! differences, so a curve yields `n_s - 1` velocity samples; for closed curves
//! the closing segment back to the first point is implicit and never appears in
//! the velocity field.

use serde::{Deserialize, Serialize};

use crate::error::{RemlError, Result};
use crate::vec2::{unwrap_angles, Vec2};

/// Segments shorter than this are rejected.
pub const DEGENERATE_LENGTH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarCurve {
    points: Vec<Vec2>,
    closed: bool,
}

impl PlanarCurve {
    /// Validates the raw points without normalizing them.
    pub fn new(points: Vec<Vec2>, closed: bool) -> Result<Self> {
        check_points(&points)?;
        for (index, w) in points.windows(2).enumerate() {
            let length = (w[1] - w[0]).norm();
            if length < DEGENERATE_LENGTH {
                return Err(RemlError::DegenerateSegment { index, length });
            }
        }
        Ok(PlanarCurve { points, closed })
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec2> {
        self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ds(&self) -> f64 {
        1.0 / (self.points.len() - 1) as f64
    }

    pub fn centroid(&self) -> Vec2 {
        centroid(&self.points)
    }

    /// Sum of segment lengths, including the closing segment for closed curves.
    pub fn total_length(&self) -> f64 {
        total_length(&self.points, self.closed)
    }

    pub fn translated(&self, offset: Vec2) -> PlanarCurve {
        PlanarCurve {
            points: self.points.iter().map(|&p| p + offset).collect(),
            closed: self.closed,
        }
    }

    pub fn rotated(&self, angle: f64) -> PlanarCurve {
        PlanarCurve {
            points: self.points.iter().map(|&p| p.rotate(angle)).collect(),
            closed: self.closed,
        }
    }

    pub fn scaled(&self, factor: f64) -> PlanarCurve {
        PlanarCurve {
            points: self.points.iter().map(|&p| p * factor).collect(),
            closed: self.closed,
        }
    }

    /// Largest pointwise distance to another curve with the same sampling.
    pub fn max_point_distance(&self, other: &PlanarCurve) -> Result<f64> {
        if self.len() != other.len() {
            return Err(RemlError::ShapeMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(self
            .points
            .iter()
            .zip(&other.points)
            .map(|(&p, &q)| (p - q).norm())
            .fold(0.0, f64::max))
    }
}

fn check_points(points: &[Vec2]) -> Result<()> {
    if points.len() < 3 {
        return Err(RemlError::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    if let Some(index) = points.iter().position(|p| !p.is_finite()) {
        return Err(RemlError::NonFiniteCoordinate { index });
    }
    Ok(())
}

fn centroid(points: &[Vec2]) -> Vec2 {
    let sum = points.iter().fold(Vec2::ZERO, |acc, &p| acc + p);
    sum / points.len() as f64
}

fn total_length(points: &[Vec2], closed: bool) -> f64 {
    let open: f64 = points.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    if closed {
        open + (points[0] - points[points.len() - 1]).norm()
    } else {
        open
    }
}

/// Removes translation and scale from a raw outline: the result is centered at
/// its centroid and has unit total length. With `align_rotation` the curve is
/// also rotated so its first segment points along +x.
///
/// For closed curves a trailing copy of the first point is dropped, since the
/// closing segment is implicit.
pub fn validate_and_normalize(
    raw_points: &[Vec2],
    closed: bool,
    align_rotation: bool,
) -> Result<PlanarCurve> {
    check_points(raw_points)?;
    let mut points = raw_points.to_vec();
    if closed && points.len() > 3 && points[0] == points[points.len() - 1] {
        points.pop();
    }

    let center = centroid(&points);
    let length = total_length(&points, closed);
    if !(length >= DEGENERATE_LENGTH) {
        return Err(RemlError::DegenerateSegment { index: 0, length });
    }
    for p in points.iter_mut() {
        *p = (*p - center) / length;
    }
    if align_rotation {
        let heading = (points[1] - points[0]).angle();
        for p in points.iter_mut() {
            *p = p.rotate(-heading);
        }
    }
    PlanarCurve::new(points, closed)
}

/// Discrete velocity `c'` of a curve: forward differences over `n_s - 1`
/// segments, their magnitudes, and sequentially unwrapped tangent angles.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    vectors: Vec<Vec2>,
    magnitudes: Vec<f64>,
    angles: Vec<f64>,
    ds: f64,
}

impl VelocityField {
    /// Builds a field from raw velocity vectors; angles are unwrapped from the
    /// principal angle of the first vector.
    pub fn from_vectors(vectors: Vec<Vec2>, ds: f64) -> Result<Self> {
        let magnitudes: Vec<f64> = vectors.iter().map(|v| v.norm()).collect();
        if let Some(index) = magnitudes
            .iter()
            .position(|&m| !(m * ds >= DEGENERATE_LENGTH))
        {
            return Err(RemlError::DegenerateSegment {
                index,
                length: magnitudes[index] * ds,
            });
        }
        let principal: Vec<f64> = vectors.iter().map(|v| v.angle()).collect();
        let angles = unwrap_angles(&principal);
        Ok(VelocityField {
            vectors,
            magnitudes,
            angles,
            ds,
        })
    }

    pub fn vectors(&self) -> &[Vec2] {
        &self.vectors
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

pub fn derivative(curve: &PlanarCurve) -> Result<VelocityField> {
    let ds = curve.ds();
    let vectors = curve
        .points()
        .windows(2)
        .map(|w| (w[1] - w[0]) / ds)
        .collect();
    VelocityField::from_vectors(vectors, ds)
}

/// Discretized elastic inner product `g^{a,b}_c(h, k)`.
///
/// `h` and `k` are deformation fields sampled at the curve's points. The
/// arc-length derivative on segment `j` is `(h[j+1] - h[j]) / (‖c'_j‖ Δs)`, and
/// the integral over arc length is the Riemann sum with element `‖c'_j‖ Δs`.
pub fn elastic_inner_product(
    curve: &PlanarCurve,
    h: &[Vec2],
    k: &[Vec2],
    a: f64,
    b: f64,
) -> Result<f64> {
    let n = curve.len();
    for field in [h, k] {
        if field.len() != n {
            return Err(RemlError::ShapeMismatch {
                expected: n,
                got: field.len(),
            });
        }
    }
    if !(a > 0.0) {
        return Err(RemlError::NonPositiveA(a));
    }
    if !(b > 0.0) {
        return Err(RemlError::InvalidConfig(format!(
            "b must be positive, got {b}"
        )));
    }

    let velocity = derivative(curve)?;
    let ds = velocity.ds();
    let mut total = 0.0;
    for j in 0..velocity.len() {
        let speed = velocity.magnitudes()[j];
        let arc = speed * ds;
        let tangent = velocity.vectors()[j] / speed;
        let normal = tangent.perp();
        let dh = (h[j + 1] - h[j]) / arc;
        let dk = (k[j + 1] - k[j]) / arc;
        let normal_part = dh.dot(normal) * dk.dot(normal);
        let tangent_part = dh.dot(tangent) * dk.dot(tangent);
        total += (a * a * normal_part + b * b * tangent_part) * arc;
    }
    Ok(total)
}
