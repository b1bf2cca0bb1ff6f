//! Normalize a raw outline, inspect its discrete velocity, and evaluate the
//! elastic inner product for a few values of `a`.

use reml::{derivative, elastic_inner_product, validate_and_normalize, Vec2};

fn main() -> reml::Result<()> {
    // A lopsided pentagon in pixel units.
    let raw = [
        Vec2::new(120.0, 40.0),
        Vec2::new(180.0, 90.0),
        Vec2::new(150.0, 170.0),
        Vec2::new(70.0, 160.0),
        Vec2::new(60.0, 80.0),
    ];
    let curve = validate_and_normalize(&raw, true, false)?;
    println!(
        "centroid {:?}, length {:.12}",
        curve.centroid(),
        curve.total_length()
    );

    let velocity = derivative(&curve)?;
    for (k, (m, th)) in velocity
        .magnitudes()
        .iter()
        .zip(velocity.angles())
        .enumerate()
    {
        println!("segment {k}: speed {m:.4}, angle {th:+.4} rad");
    }

    // Scaling about the centroid only stretches segments, so it is measured
    // by the b term alone. An infinitesimal rotation only turns them, so it
    // is measured by the a term. A translation costs nothing.
    let stretch: Vec<Vec2> = curve.points().iter().map(|&p| p * 0.1).collect();
    let turn: Vec<Vec2> = curve.points().iter().map(|&p| p.perp() * 0.1).collect();
    let slide = vec![Vec2::new(0.3, 0.0); curve.len()];
    for a in [0.25, 0.5, 1.0, 2.0] {
        let g = |h: &[Vec2]| elastic_inner_product(&curve, h, h, a, 0.5);
        println!(
            "a = {a}: stretch {:.6}, turn {:.6}, slide {:.1e}",
            g(&stretch)?,
            g(&turn)?,
            g(&slide)?
        );
    }
    Ok(())
}
