//! Fit a geodesic regression on the train split of a trajectory, score it on
//! each split, and reconstruct a predicted future outline.

use reml::learner::{test_problem, validation_problem};
use reml::synthetic::synthesize;
use reml::{f_inverse, predict};

fn main() -> reml::Result<()> {
    let traj = synthesize(0.7, 80, 40, 0.001, 3)?;
    let (train_end, val_end) = traj.split_indices();
    println!(
        "T = {}, train {train_end}, validation {}, test {}",
        traj.len(),
        val_end - train_end,
        traj.len() - val_end
    );

    let validation = validation_problem(&traj)?;
    let test = test_problem(&traj)?;
    for a in [0.3, 0.7, 1.0] {
        println!(
            "a = {a}: validation R² {:+.5}, test R² {:+.5}",
            validation.r_squared_at(a)?,
            test.r_squared_at(a)?
        );
    }

    let model = validation.fit_at(0.7)?;
    let last = traj.len() - 1;
    let t = traj.times()[last];
    let predicted = f_inverse(&predict(&model, t), traj.curves()[last].points()[0])?;
    let observed = &traj.curves()[last];
    println!(
        "prediction at t = {t}: {} points, max deviation from the observed outline {:.4}",
        predicted.len(),
        predicted.max_point_distance(observed)?
    );
    Ok(())
}
