//! A correlated Brownian motion in a region bounded by `y = 0` and `y = a x`
//! is mapped to a standard one in a wedge, simulated there, and read back in
//! the original coordinates.

use wedgesim::geometry::{decorrelate, CorrelatedSetup, RegionCase};
use wedgesim::mc::{estimate, EstimatorConfig, Mode, TestFunction};
use wedgesim::Result;

pub fn run() -> Result<()> {
    let cases = [
        (RegionCase::AndPos, 1.0, [2.0, 1.0]),
        (RegionCase::AndNeg, -1.0, [0.5, 1.0]),
        (RegionCase::OrPos, 1.0, [-1.0, 0.5]),
        (RegionCase::OrNeg, -2.0, [-1.0, -0.5]),
    ];
    for (region, slope, start) in cases {
        let setup = CorrelatedSetup {
            sigma1: 1.0,
            sigma2: 0.7,
            rho: 0.4,
            slope,
            region,
            start,
            drift: [0.1, 0.0],
        };
        let p = decorrelate(&setup)?;
        let mut c = EstimatorConfig::from_problem(&p, Mode::Reflected, TestFunction::RadiusSq);
        c.n_samples = 5_000;
        c.seed = 5;
        let r = estimate(&c)?;
        println!(
            "{region:?}: opening {:.4}, start ({:.4}, {:.4}), E |X_1|^2 = {:.4} +- {:.4}",
            p.wedge.opening(),
            p.start.r,
            p.start.theta,
            r.estimate,
            r.half_width_95
        );
    }

    // sigma2 = a sigma1 rho makes the slanted ray vertical: two independent half-lines
    let quadrant = CorrelatedSetup {
        sigma1: 1.0,
        sigma2: 0.5,
        rho: 0.5,
        slope: 1.0,
        region: RegionCase::AndPos,
        start: [2.0, 1.0],
        drift: [0.0, 0.0],
    };
    let p = decorrelate(&quadrant)?;
    let mut c = EstimatorConfig::from_problem(&p, Mode::Stopped, TestFunction::IndicatorSurvival);
    c.seed = 5;
    let r = estimate(&c)?;
    println!(
        "quadrant product: P(tau > 1) = {:.4} +- {:.4}",
        r.estimate, r.half_width_95
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
