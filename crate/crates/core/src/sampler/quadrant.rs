//! The quadrant as a product of two half-lines.

use super::PathSample;
use crate::density::{one_dim_factor, Kind, Side};
use crate::error::{Error, Result};
use crate::geometry::PolarPoint;
use crate::rng::RngStream;

/// `W_h` on `[0, inf)` started at `x0 > 0`, conditioned on not reaching zero
/// before `h`.
fn killed_endpoint(x0: f64, h: f64, rng: &mut RngStream) -> f64 {
    let sd = h.sqrt();
    loop {
        let w = x0 + sd * rng.normal();
        if w > 0.0 && rng.uniform() < one_dim_factor(Kind::Killed, x0, w, h) {
            return w;
        }
    }
}

/// Hitting time of zero from `x0`: `x0^2 / G^2`.
fn hitting_time(x0: f64, rng: &mut RngStream) -> f64 {
    let g = rng.normal();
    x0 * x0 / (g * g)
}

fn check(x: [f64; 2], horizon: f64) -> Result<()> {
    if !(horizon > 0.0) || !(x[0] >= 0.0 && x[1] >= 0.0) {
        return Err(Error::OutsideRegion);
    }
    Ok(())
}

/// Stopped motion in the quadrant `<0, pi/2>` from coordinate hitting times.
pub fn quadrant_stopped(x: [f64; 2], horizon: f64, rng: &mut RngStream) -> Result<PathSample> {
    check(x, horizon)?;
    let t = [hitting_time(x[0], rng), hitting_time(x[1], rng)];
    let (stop, hit) = if t[0] < t[1] { (t[0], 0) } else { (t[1], 1) };
    let (point, elapsed, boundary) = if stop >= horizon {
        (
            [killed_endpoint(x[0], horizon, rng), killed_endpoint(x[1], horizon, rng)],
            horizon,
            None,
        )
    } else {
        // the other coordinate survived up to `stop`; its own hitting time is forgotten
        let other = 1 - hit;
        let mut p = [0.0; 2];
        p[other] = if stop > 0.0 { killed_endpoint(x[other], stop, rng) } else { x[other] };
        (p, stop, Some(if hit == 1 { Side::Minus } else { Side::Plus }))
    };
    let mut endpoint = PolarPoint::from_cartesian(point);
    if let Some(side) = boundary {
        endpoint.theta = match side {
            Side::Minus => 0.0,
            Side::Plus => std::f64::consts::FRAC_PI_2,
        };
    }
    Ok(PathSample {
        endpoint,
        elapsed,
        boundary,
        folds: 1,
        log_weight: 0.0,
        approx_used: false,
        driving_endpoint: Some(point),
    })
}

/// Reflected motion in the quadrant: coordinate-wise absolute values.
pub fn quadrant_reflected(x: [f64; 2], horizon: f64, rng: &mut RngStream) -> Result<PathSample> {
    check(x, horizon)?;
    let sd = horizon.sqrt();
    let w = [x[0] + sd * rng.normal(), x[1] + sd * rng.normal()];
    Ok(PathSample {
        endpoint: PolarPoint::from_cartesian([w[0].abs(), w[1].abs()]),
        elapsed: horizon,
        boundary: None,
        folds: 1,
        log_weight: 0.0,
        approx_used: false,
        driving_endpoint: Some(w),
    })
}
