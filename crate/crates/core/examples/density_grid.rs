//! Transition densities of a wedge of opening pi/3: image sums against the
//! Bessel series, and the total mass of both kernels.

use wedgesim::density::{
    area_to_polar, integrate_over_wedge, killed_density_images, killed_density_series, reflected_density_images,
    reflected_density_series, survival_probability, Kind,
};
use wedgesim::geometry::{PolarPoint, WedgeSpec};
use wedgesim::special::SeriesTolerance;
use wedgesim::Result;

pub fn run() -> Result<()> {
    let wedge = WedgeSpec::with_opening(std::f64::consts::PI / 3.0)?;
    let images = wedge.as_pi_over_m()?;
    let x = PolarPoint::new(1.5, 0.3);
    let t = 0.7;
    let tol = SeriesTolerance::default();

    println!("r,theta,reflected_images,reflected_series,killed_images,killed_series");
    for r in [0.5, 1.0, 1.5, 2.5] {
        for theta in [0.1, 0.5, 0.9] {
            let y = PolarPoint::new(r, theta);
            println!(
                "{r},{theta},{:.12e},{:.12e},{:.12e},{:.12e}",
                area_to_polar(reflected_density_images(&images, x, y, t)?, r),
                reflected_density_series(&wedge, x, y, t, tol)?,
                area_to_polar(killed_density_images(&images, x, y, t)?, r),
                killed_density_series(&wedge, x, y, t, tol)?,
            );
        }
    }

    let reflected = integrate_over_wedge(&images, x, t, Kind::Reflected)?;
    let killed = integrate_over_wedge(&images, x, t, Kind::Killed)?;
    let survival = survival_probability(&images, x, t)?;
    println!("reflected mass {reflected:.10}");
    println!("killed mass {killed:.10}, survival probability {survival:.10}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
