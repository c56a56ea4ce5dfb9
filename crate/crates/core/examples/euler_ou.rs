//! Mean-reverting process `dY = -mu (Y - kappa) dt + dW` stopped at, or
//! reflected on, the boundary of a wedge of opening 0.9, by the
//! frozen-coefficient Euler scheme.

use wedgesim::drift::LinearField;
use wedgesim::geometry::{Mat2, PolarPoint};
use wedgesim::mc::{estimate, EstimatorConfig, ItoSpec, Mode, TestFunction};
use wedgesim::Result;

pub fn run() -> Result<()> {
    let field = LinearField {
        mu: [0.1, 0.2],
        kappa: [0.7, 0.5],
        sigma: Mat2::IDENTITY,
    };
    for (mode, eps) in [(Mode::EulerStopped, 0.03), (Mode::EulerReflected, 0.01)] {
        for steps in [50, 500, 5000] {
            let mut c = EstimatorConfig::new(0.9, PolarPoint::new(1.5, 0.3), mode, TestFunction::RadiusSq);
            c.ito = Some(ItoSpec { field, steps });
            c.epsilon = eps;
            c.n_samples = 500;
            c.seed = 1;
            let r = estimate(&c)?;
            println!(
                "{} step T/{steps}: {:.4} +- {:.4} ({:.2} s)",
                mode.name(),
                r.estimate,
                r.half_width_95,
                r.wall_time_seconds
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
