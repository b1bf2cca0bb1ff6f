//! Build an exact geodesic between two outlines, add coordinate noise, and
//! save the trajectory as JSON.
//!
//! Usage: `cargo run --example synthetic_trajectory -- [out.json]`

use std::path::PathBuf;

use reml::io::write_trajectory;
use reml::synthetic::{add_noise, endpoint_shapes, geodesic_between};

fn main() -> reml::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let (c0, c1) = endpoint_shapes(40, 12)?;
    let clean = geodesic_between(&c0, &c1, 0.6, 50)?;
    let noisy = add_noise(&clean, 0.001, 12)?;

    println!("split {:?}", noisy.split_indices());
    for i in [0, 10, 25, 49] {
        let drift = clean.curves()[i].max_point_distance(&noisy.curves()[i])?;
        println!(
            "t = {:.3}: centroid {:?}, max noise displacement {drift:.4}",
            noisy.times()[i],
            clean.curves()[i].centroid()
        );
    }
    if let Some(path) = out {
        write_trajectory(&path, &noisy)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
