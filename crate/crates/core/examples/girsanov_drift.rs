//! Constant drift through Girsanov weights: the weights have mean one, and
//! the drifted means move in the direction of the drift.

use wedgesim::geometry::PolarPoint;
use wedgesim::mc::{estimate, EstimatorConfig, Mode, TestFunction};
use wedgesim::Result;

pub fn run() -> Result<()> {
    for mode in [Mode::Stopped, Mode::Reflected] {
        for f in [TestFunction::Constant1, TestFunction::Coord1] {
            for drift in [[0.0, 0.0], [0.3, -0.2]] {
                let mut c = EstimatorConfig::new(0.9, PolarPoint::new(1.5, 0.3), mode, f);
                c.drift = drift;
                c.seed = 3;
                let r = estimate(&c)?;
                println!(
                    "{} {} b = {drift:?}: {:.4} +- {:.4} (effective sample size {:.0})",
                    mode.name(),
                    f.name(),
                    r.estimate,
                    r.half_width_95,
                    r.effective_sample_size
                );
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
