//! Compare the analytic derivative of validation R² with central differences
//! across a range of metrics.

use reml::gradient::{dr2_da, fd_r2_gradient, FD_EPS};
use reml::learner::validation_problem;
use reml::synthetic::synthesize;

fn main() -> reml::Result<()> {
    let traj = synthesize(0.5, 40, 30, 0.001, 1)?;
    let problem = validation_problem(&traj)?;
    println!(
        "{:>5} {:>12} {:>14} {:>14} {:>10}",
        "a", "R²", "dR²/da", "central diff", "rel err"
    );
    for i in 1..=10 {
        let a = 0.2 * i as f64;
        let report = dr2_da(&problem, a)?;
        let fd = fd_r2_gradient(&problem, a, FD_EPS)?;
        let rel = (report.dr2_da - fd).abs() / report.dr2_da.abs().max(1.0);
        println!(
            "{a:5.2} {:12.6} {:14.6e} {fd:14.6e} {rel:10.2e}",
            report.r2, report.dr2_da
        );
    }
    Ok(())
}
