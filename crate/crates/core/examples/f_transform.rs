//! Map an outline into F-space for several metrics, invert it, and measure
//! F-space distances between two outlines.

use reml::synthetic::endpoint_shapes;
use reml::{f_distance, f_inverse, transform_curve};

fn main() -> reml::Result<()> {
    let (c0, c1) = endpoint_shapes(50, 7)?;
    for a in [0.2, 0.5, 1.0, 2.0] {
        let q0 = transform_curve(&c0, a)?;
        let back = f_inverse(&q0, c0.points()[0])?;
        let err = c0.max_point_distance(&back)?;
        let d = f_distance(&q0, &transform_curve(&c1, a)?)?;
        println!(
            "a = {a}: {} samples, round-trip error {err:.1e}, distance to second outline {d:.4}",
            q0.len()
        );
    }

    // Rotating a curve by φ rotates every F-sample by a·φ.
    let a = 0.5;
    let phi = 0.4;
    let q = transform_curve(&c0, a)?;
    let q_rot = transform_curve(&c0.rotated(phi), a)?;
    let turn = q_rot.samples()[3].angle() - q.samples()[3].angle();
    println!(
        "rotating by {phi} turns F-samples by {turn:.6} (a·φ = {})",
        a * phi
    );
    Ok(())
}
