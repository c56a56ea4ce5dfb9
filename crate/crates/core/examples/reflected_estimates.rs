//! Normally reflected Brownian motion in wedges that are not of the form
//! pi/m, with the corner approximation at threshold 0.03.

use wedgesim::geometry::PolarPoint;
use wedgesim::mc::{estimate, EstimatorConfig, Mode, TestFunction};
use wedgesim::Result;

pub fn run() -> Result<()> {
    let mut c = EstimatorConfig::new(0.9, PolarPoint::new(1.5, 0.3), Mode::Reflected, TestFunction::RadiusSq);
    c.seed = 42;
    let r = estimate(&c)?;
    println!(
        "alpha 0.9, E f(X_1) = {:.4} +- {:.4}, mean folds {:.3}",
        r.estimate, r.half_width_95, r.mean_folds
    );

    for mode in [Mode::Stopped, Mode::Reflected] {
        let mut c = EstimatorConfig::new(0.58, PolarPoint::new(3.0, 0.4), mode, TestFunction::SinSqTheta);
        c.n_samples = if mode == Mode::Stopped { 10_000 } else { 5_000 };
        c.seed = 42;
        let r = estimate(&c)?;
        println!(
            "alpha 0.58, {}: E sin^2 theta = {:.4} +- {:.4}",
            mode.name(),
            r.estimate,
            r.half_width_95
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
