use std::f64::consts::PI;

use super::exit::{sample_exit_radius, sample_exit_side, sample_exit_time, sample_survivor};
use super::PathSample;
use crate::density::{ExitLawParams, Side};
use crate::error::{ensure_finite, Error, Result};
use crate::geometry::{sub_wedge_index, PiOverM, PolarPoint, ANGLE_TOL, PI_OVER_M_TOL};
use crate::rng::RngStream;

/// Brownian motion in `<0, alpha>` started at `start`, stopped at the first
/// hit of the boundary or at `horizon` (which may be infinite).
///
/// Each iteration stops the motion on a `pi/m` sub-wedge of the largest
/// admissible opening. The path ends when the sub-wedge exit lies on an outer
/// ray, or when the exit would come after the horizon, in which case the
/// endpoint is redrawn conditionally on survival in the sub-wedge.
pub fn algorithm_i(
    start: PolarPoint,
    horizon: f64,
    alpha: f64,
    fold_cap: u64,
    rng: &mut RngStream,
) -> Result<PathSample> {
    ensure_finite(&[start.r, start.theta, alpha])?;
    if !(horizon > 0.0) || !(alpha > 0.0 && alpha < 2.0 * PI) {
        return Err(Error::InvalidParameter(format!(
            "need horizon > 0 and alpha in (0, 2pi), got {horizon}, {alpha}"
        )));
    }
    if start.theta < -ANGLE_TOL || start.theta > alpha + ANGLE_TOL || start.r < 0.0 {
        return Err(Error::OutsideRegion);
    }
    let m = sub_wedge_index(alpha);
    let big = PI / m as f64;
    let exact = (alpha - big).abs() <= PI_OVER_M_TOL;

    let mut r = start.r;
    let mut theta = start.theta;
    let mut now = 0.0;
    let mut folds = 0u64;

    let boundary_start = if r == 0.0 || theta <= ANGLE_TOL {
        Some(Side::Minus)
    } else if theta >= alpha - ANGLE_TOL {
        Some(Side::Plus)
    } else {
        None
    };
    if let Some(side) = boundary_start {
        let th = if side == Side::Minus { 0.0 } else { alpha };
        return Ok(finish(PolarPoint::new(r, th), 0.0, Some(side), 0));
    }

    loop {
        if folds >= fold_cap {
            return Err(Error::IterationCap {
                cap: fold_cap,
                partial: Box::new(finish(PolarPoint::new(r, theta), now, None, folds)),
            });
        }
        folds += 1;

        // three-interval rule; a tie with an interval end goes to the middle
        let top = if exact { 0.0 } else { alpha - big };
        let base = if exact || theta < 0.5 * big {
            0.0
        } else if theta > alpha - 0.5 * big {
            top
        } else {
            (theta - 0.5 * big).clamp(0.0, top)
        };
        let sub = PiOverM::new(m, base);
        let rel = theta - base;
        let here = PolarPoint::new(r, theta);

        let side = sample_exit_side(rel, big, rng)?;
        let r_exit = sample_exit_radius(r, rel, big, side, rng);
        let params = ExitLawParams::new(sub, here, side);
        let tau = sample_exit_time(&params, r_exit, rng)?;

        if now + tau >= horizon {
            let y = sample_survivor(here, &sub, horizon - now, rng)?;
            return Ok(finish(y, horizon, None, folds));
        }
        now += tau;
        r = r_exit;
        let outer = match side {
            Side::Minus if base == 0.0 => Some((Side::Minus, 0.0)),
            Side::Plus if base == top => Some((Side::Plus, alpha)),
            _ => None,
        };
        if let Some((s, th)) = outer {
            return Ok(finish(PolarPoint::new(r, th), now, Some(s), folds));
        }
        theta = match side {
            Side::Minus => base,
            Side::Plus => base + big,
        };
    }
}

fn finish(endpoint: PolarPoint, elapsed: f64, boundary: Option<Side>, folds: u64) -> PathSample {
    PathSample {
        endpoint,
        elapsed,
        boundary,
        folds,
        log_weight: 0.0,
        approx_used: false,
        driving_endpoint: Some(endpoint.cartesian()),
    }
}
