//! Brownian motion stopped on the boundary of a wedge of opening 0.9 from
//! `(1.5, 0.3)`: moments of the stopped endpoint and of the exit time.

use wedgesim::geometry::PolarPoint;
use wedgesim::mc::{estimate, EstimatorConfig, Mode, TestFunction};
use wedgesim::Result;

pub fn run() -> Result<()> {
    let start = PolarPoint::new(1.5, 0.3);
    let rows = [
        ("E f(W_{tau ^ 1})", TestFunction::RadiusSq, 1.0, 10_000),
        ("E W_{tau ^ 1} . e1", TestFunction::Coord1, 1.0, 10_000),
        ("E f(W_tau)", TestFunction::RadiusSq, f64::INFINITY, 50_000),
        ("E tau", TestFunction::Elapsed, f64::INFINITY, 20_000),
    ];
    for (label, f, horizon, n) in rows {
        let mut c = EstimatorConfig::new(0.9, start, Mode::Stopped, f);
        c.horizon = horizon;
        c.n_samples = n;
        c.seed = 42;
        let r = estimate(&c)?;
        println!(
            "{label}: {:.4} +- {:.4} ({} paths, mean folds {:.3}, {:.2} s)",
            r.estimate, r.half_width_95, r.n_samples, r.mean_folds, r.wall_time_seconds
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
