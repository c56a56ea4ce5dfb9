//! Modified Bessel functions of the first kind across the power-series and
//! asymptotic regimes, and the truncation point of a Bessel series.

use wedgesim::special::{bessel_i, bessel_i_scaled, log_bessel_i, series_tail_cutoff, SeriesTolerance};
use wedgesim::Result;

pub fn run() -> Result<()> {
    let tol = SeriesTolerance::default();
    println!("nu,x,I,exp(-x) I,log I");
    for nu in [0.0, 0.5, 3.5, 20.0] {
        for x in [1e-3, 1.0, 30.0, 800.0] {
            println!(
                "{nu},{x},{:.12e},{:.12e},{:.12}",
                bessel_i(nu, x, tol)?,
                bessel_i_scaled(nu, x, tol)?,
                log_bessel_i(nu, x, tol)?
            );
        }
    }
    for (step, x) in [(1.0, 1.0), (std::f64::consts::PI / 0.9, 5.0), (3.0, 50.0)] {
        println!("terms needed for step {step:.4} at x = {x}: {}", series_tail_cutoff(step, x, tol));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
