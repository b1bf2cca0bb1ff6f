//! Synthetic trajectories: exact elastic geodesics between two procedural
//! cell-like outlines, optional Gaussian coordinate noise, and the sequential
//! 60/30/10 train/validation/test split.

use std::f64::consts::TAU;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::curve::{derivative, validate_and_normalize, PlanarCurve};
use crate::error::{RemlError, Result};
use crate::ftransform::{f_inverse, transform_curve, FPoint};
use crate::vec2::{wrap_angle, Vec2};

pub const MIN_TRAJECTORY_LEN: usize = 5;

/// A time-ordered sequence of curves with normalized times `t_i = i / (T - 1)`
/// and a sequential split `[0, train_end) / [train_end, val_end) / [val_end, T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrajectoryFile", into = "TrajectoryFile")]
pub struct Trajectory {
    curves: Vec<PlanarCurve>,
    times: Vec<f64>,
    split: (usize, usize),
    a_true: Option<f64>,
    sigma: f64,
    seed: u64,
}

impl Trajectory {
    /// Builds a trajectory with uniform times on `[0, 1]` and the default split.
    pub fn new(
        curves: Vec<PlanarCurve>,
        a_true: Option<f64>,
        sigma: f64,
        seed: u64,
    ) -> Result<Self> {
        let n = curves.len();
        let split = split_indices(n)?;
        let times = uniform_times(n);
        Self::from_parts(curves, times, split, a_true, sigma, seed)
    }

    pub fn from_parts(
        curves: Vec<PlanarCurve>,
        times: Vec<f64>,
        split: (usize, usize),
        a_true: Option<f64>,
        sigma: f64,
        seed: u64,
    ) -> Result<Self> {
        let n = curves.len();
        if n < MIN_TRAJECTORY_LEN {
            return Err(RemlError::TrajectoryTooShort(n));
        }
        if times.len() != n {
            return Err(RemlError::ShapeMismatch {
                expected: n,
                got: times.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RemlError::InvalidConfig(
                "times must be strictly increasing".into(),
            ));
        }
        let ns = curves[0].len();
        if let Some(c) = curves.iter().find(|c| c.len() != ns) {
            return Err(RemlError::ShapeMismatch {
                expected: ns,
                got: c.len(),
            });
        }
        let (train_end, val_end) = split;
        if !(0 < train_end && train_end < val_end && val_end < n) {
            return Err(RemlError::DegenerateSplit(format!(
                "split ({train_end}, {val_end}) invalid for T = {n}"
            )));
        }
        Ok(Trajectory {
            curves,
            times,
            split,
            a_true,
            sigma,
            seed,
        })
    }

    pub fn curves(&self) -> &[PlanarCurve] {
        &self.curves
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn n_samples(&self) -> usize {
        self.curves[0].len()
    }

    pub fn split_indices(&self) -> (usize, usize) {
        self.split
    }

    pub fn a_true(&self) -> Option<f64> {
        self.a_true
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn train_range(&self) -> Range<usize> {
        0..self.split.0
    }

    pub fn validation_range(&self) -> Range<usize> {
        self.split.0..self.split.1
    }

    pub fn test_range(&self) -> Range<usize> {
        self.split.1..self.curves.len()
    }
}

#[derive(Serialize, Deserialize)]
struct TrajectoryFile {
    a_true: Option<f64>,
    sigma: f64,
    seed: u64,
    times: Vec<f64>,
    curves: Vec<Vec<Vec2>>,
    split: [usize; 2],
}

impl TryFrom<TrajectoryFile> for Trajectory {
    type Error = RemlError;

    fn try_from(f: TrajectoryFile) -> Result<Self> {
        let curves = f
            .curves
            .into_iter()
            .map(|pts| PlanarCurve::new(pts, true))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::from_parts(
            curves,
            f.times,
            (f.split[0], f.split[1]),
            f.a_true,
            f.sigma,
            f.seed,
        )
    }
}

impl From<Trajectory> for TrajectoryFile {
    fn from(t: Trajectory) -> Self {
        TrajectoryFile {
            a_true: t.a_true,
            sigma: t.sigma,
            seed: t.seed,
            times: t.times,
            curves: t.curves.into_iter().map(PlanarCurve::into_points).collect(),
            split: [t.split.0, t.split.1],
        }
    }
}

pub fn uniform_times(n: usize) -> Vec<f64> {
    let denom = (n.max(2) - 1) as f64;
    (0..n).map(|i| i as f64 / denom).collect()
}

/// Sequential 60/30/10 split by flooring; if the test part would be empty the
/// last validation element moves to test.
pub fn split_indices(n: usize) -> Result<(usize, usize)> {
    if n < MIN_TRAJECTORY_LEN {
        return Err(RemlError::TrajectoryTooShort(n));
    }
    let train_end = 6 * n / 10;
    let mut val_end = train_end + 3 * n / 10;
    if val_end >= n {
        val_end = n - 1;
    }
    Ok((train_end, val_end))
}

/// Recomputes the default split for a trajectory.
pub fn split(traj: Trajectory) -> Result<Trajectory> {
    let s = split_indices(traj.len())?;
    Trajectory::from_parts(
        traj.curves,
        traj.times,
        s,
        traj.a_true,
        traj.sigma,
        traj.seed,
    )
}

/// Two smooth closed cell-like outlines: ellipses modulated by a few seeded
/// low-frequency radial harmonics, sampled at `n_s` points and normalized.
/// The second outline is rotated against the first by a seeded turn.
pub fn endpoint_shapes(n_s: usize, seed: u64) -> Result<(PlanarCurve, PlanarCurve)> {
    endpoint_shapes_with_amplitude(n_s, seed, 1.0)
}

/// As [`endpoint_shapes`], with the harmonic amplitudes multiplied by
/// `amplitude_scale` (0 gives plain ellipses).
pub fn endpoint_shapes_with_amplitude(
    n_s: usize,
    seed: u64,
    amplitude_scale: f64,
) -> Result<(PlanarCurve, PlanarCurve)> {
    if n_s < 10 {
        return Err(RemlError::TooFewPoints {
            needed: 10,
            got: n_s,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = outline(n_s, &mut rng, amplitude_scale, 0.0)?;
    let turn = rng.random_range(MIN_RELATIVE_TURN..MAX_RELATIVE_TURN);
    let turn = if rng.random_bool(0.5) { turn } else { -turn };
    let second = outline(n_s, &mut rng, amplitude_scale, turn)?;

    // Rotate the pair together so their first tangents straddle angle 0.
    // Every curve on the geodesic then keeps its first tangent well inside
    // (-π, π), where F_a is continuous.
    let t0 = derivative(&first)?.angles()[0];
    let t1 = t0 + wrap_angle(derivative(&second)?.angles()[0] - t0);
    let common = -0.5 * (t0 + t1);
    Ok((first.rotated(common), second.rotated(common)))
}

/// Upper bound on the summed harmonic amplitude, relative to the mean radius.
const MAX_PERTURBATION: f64 = 0.2;

/// The second outline is turned by a seeded angle of this magnitude (radians)
/// relative to the first. Nearly co-oriented endpoints carry almost no
/// information about `a`, and turns approaching `π` would push F-space
/// geodesics through zero samples.
const MIN_RELATIVE_TURN: f64 = 0.5;
const MAX_RELATIVE_TURN: f64 = 1.5;

fn outline(
    n_s: usize,
    rng: &mut ChaCha8Rng,
    amplitude_scale: f64,
    turn: f64,
) -> Result<PlanarCurve> {
    let aspect: f64 = rng.random_range(0.55..0.95);
    let count: usize = rng.random_range(3..=6);
    let harmonics: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| {
            let freq = rng.random_range(2..=6) as f64;
            let amp = rng.random_range(0.0..MAX_PERTURBATION / count as f64);
            let phase = rng.random_range(0.0..TAU);
            (freq, amp * amplitude_scale, phase)
        })
        .collect();
    let points: Vec<Vec2> = (0..n_s)
        .map(|i| {
            let phi = TAU * i as f64 / n_s as f64;
            let radial = 1.0
                + harmonics
                    .iter()
                    .map(|&(f, amp, ph)| amp * (f * phi + ph).cos())
                    .sum::<f64>();
            (Vec2::new(phi.cos(), aspect * phi.sin()) * radial).rotate(turn)
        })
        .collect();
    validate_and_normalize(&points, true, false)
}

/// Samples the F-space straight line from `F_a(c0)` to `F_a(c1)` at `T`
/// uniform times and maps each point back to a curve. Centroids move linearly
/// from `c0`'s to `c1`'s.
pub fn geodesic_between(
    c0: &PlanarCurve,
    c1: &PlanarCurve,
    a_true: f64,
    n_times: usize,
) -> Result<Trajectory> {
    if c0.len() != c1.len() {
        return Err(RemlError::ShapeMismatch {
            expected: c0.len(),
            got: c1.len(),
        });
    }
    if n_times < MIN_TRAJECTORY_LEN {
        return Err(RemlError::TrajectoryTooShort(n_times));
    }
    let q0 = transform_curve(c0, a_true)?;
    let q1 = transform_curve(c1, a_true)?;
    let (m0, m1) = (c0.centroid(), c1.centroid());
    let times = uniform_times(n_times);
    let curves = times
        .iter()
        .map(|&t| {
            let q = FPoint::linear_combination(&[(1.0 - t, &q0), (t, &q1)])?;
            let raw = f_inverse(&q, Vec2::ZERO)?;
            let target = m0 * (1.0 - t) + m1 * t;
            let shifted = raw.translated(target - raw.centroid());
            PlanarCurve::new(shifted.into_points(), c0.is_closed())
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(curves, Some(a_true), 0.0, 0)
}

/// Adds independent `N(0, σ²)` noise to every coordinate. Curves are
/// revalidated but not renormalized.
pub fn add_noise(traj: &Trajectory, sigma: f64, seed: u64) -> Result<Trajectory> {
    if !(sigma >= 0.0) {
        return Err(RemlError::InvalidConfig(format!(
            "sigma must be >= 0, got {sigma}"
        )));
    }
    let mut out = traj.clone();
    out.sigma = sigma;
    out.seed = seed;
    if sigma == 0.0 {
        return Ok(out);
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| RemlError::InvalidConfig(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.curves = traj
        .curves
        .iter()
        .map(|c| {
            let pts = c
                .points()
                .iter()
                .map(|&p| p + Vec2::new(normal.sample(&mut rng), normal.sample(&mut rng)))
                .collect();
            PlanarCurve::new(pts, c.is_closed())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(out)
}

/// Endpoint shapes, geodesic and noise for one grid cell, all from one seed.
pub fn synthesize(
    a_true: f64,
    n_times: usize,
    n_s: usize,
    sigma: f64,
    seed: u64,
) -> Result<Trajectory> {
    if !(a_true > 0.0) {
        return Err(RemlError::NonPositiveA(a_true));
    }
    if n_times < MIN_TRAJECTORY_LEN {
        return Err(RemlError::TrajectoryTooShort(n_times));
    }
    let (c0, c1) = endpoint_shapes(n_s, seed)?;
    let clean = geodesic_between(&c0, &c1, a_true, n_times)?;
    add_noise(&clean, sigma, noise_seed(seed)).map(|t| Trajectory { seed, ..t })
}

fn noise_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

/// Parameter lists whose Cartesian product (times seeds) defines a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    #[serde(rename = "a_true")]
    pub a_true_values: Vec<f64>,
    #[serde(rename = "T")]
    pub t_values: Vec<usize>,
    #[serde(rename = "n_s")]
    pub ns_values: Vec<usize>,
    #[serde(rename = "sigma")]
    pub sigma_values: Vec<f64>,
    pub seeds: Vec<u64>,
}

impl SweepGrid {
    /// The published experiment grid with a single seed.
    pub fn published() -> Self {
        SweepGrid {
            a_true_values: vec![0.2, 0.5, 0.7, 0.9, 1.0],
            t_values: vec![20, 50, 100, 200],
            ns_values: vec![30, 50, 100],
            sigma_values: vec![0.0, 0.001, 0.01],
            seeds: vec![0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a_true_values.is_empty()
            || self.t_values.is_empty()
            || self.ns_values.is_empty()
            || self.sigma_values.is_empty()
        {
            return Err(RemlError::InvalidConfig(
                "grid lists must be nonempty".into(),
            ));
        }
        if self.a_true_values.iter().any(|&a| !(a > 0.0)) {
            return Err(RemlError::InvalidConfig(
                "a_true values must be positive".into(),
            ));
        }
        if self.sigma_values.iter().any(|&s| !(s >= 0.0)) {
            return Err(RemlError::InvalidConfig("sigma values must be >= 0".into()));
        }
        Ok(())
    }

    /// Every `(a_true, T, n_s, σ, seed)` combination in sorted parameter order.
    pub fn cells(&self) -> Vec<GridCell> {
        let mut out = Vec::new();
        for &a_true in &self.a_true_values {
            for &n_times in &self.t_values {
                for &n_s in &self.ns_values {
                    for &sigma in &self.sigma_values {
                        for &seed in &self.seeds {
                            out.push(GridCell {
                                a_true,
                                n_times,
                                n_s,
                                sigma,
                                seed,
                            });
                        }
                    }
                }
            }
        }
        out.sort_by(GridCell::cmp_params);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub a_true: f64,
    #[serde(rename = "T")]
    pub n_times: usize,
    pub n_s: usize,
    pub sigma: f64,
    pub seed: u64,
}

impl GridCell {
    pub fn cmp_params(&self, other: &GridCell) -> std::cmp::Ordering {
        self.a_true
            .total_cmp(&other.a_true)
            .then(self.n_times.cmp(&other.n_times))
            .then(self.n_s.cmp(&other.n_s))
            .then(self.sigma.total_cmp(&other.sigma))
            .then(self.seed.cmp(&other.seed))
    }

    pub fn synthesize(&self) -> Result<Trajectory> {
        synthesize(self.a_true, self.n_times, self.n_s, self.sigma, self.seed)
    }
}
