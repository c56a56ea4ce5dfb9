//! Exit law of the half-plane from `(1, pi/2)`: exit radius against the
//! Cauchy law, exit time against the one-dimensional hitting time, and the
//! side probability.

use std::f64::consts::PI;

use wedgesim::density::{normal_cdf, ExitLawParams, Side};
use wedgesim::geometry::{PiOverM, PolarPoint};
use wedgesim::rng::RngStream;
use wedgesim::sampler::{sample_exit_radius, sample_exit_side, sample_exit_time};
use wedgesim::stats::ks_statistic;
use wedgesim::Result;

pub fn run() -> Result<()> {
    let wedge = PiOverM::new(1, 0.0);
    let start = PolarPoint::new(1.0, 0.5 * PI);
    let n = 100_000;
    let mut rng = RngStream::new(3);

    // signed exit abscissa: r on the plus ray at angle 0, -r on the minus ray at pi
    let mut abscissa = Vec::with_capacity(n);
    let mut hit_by_one = 0;
    let mut plus = 0;
    for _ in 0..n {
        let side = sample_exit_side(start.theta, PI, &mut rng)?;
        let r = sample_exit_radius(start.r, start.theta, PI, side, &mut rng);
        let t = sample_exit_time(&ExitLawParams::new(wedge, start, side), r, &mut rng)?;
        abscissa.push(if side == Side::Minus { r } else { -r });
        if t <= 1.0 {
            hit_by_one += 1;
        }
        if side == Side::Plus {
            plus += 1;
        }
    }
    let ks = ks_statistic(&abscissa, |x| 0.5 + x.atan() / PI);
    let p = hit_by_one as f64 / n as f64;
    let want = 2.0 * (1.0 - normal_cdf(1.0));
    println!("KS distance to Cauchy {ks:.4}");
    println!("P(tau <= 1) {p:.4} (exact {want:.4})");
    println!("P(plus ray) {:.4} (exact 0.5)", plus as f64 / n as f64);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
