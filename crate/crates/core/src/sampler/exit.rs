use std::f64::consts::PI;

use crate::density::{ExitLawParams, Side};
use crate::error::{Error, Result};
use crate::geometry::{PiOverM, PolarPoint};
use crate::rng::RngStream;

/// Side through which a Brownian motion started at `rel` (angle measured from
/// the minus ray) leaves a wedge of the given opening.
pub fn sample_exit_side(rel: f64, opening: f64, rng: &mut RngStream) -> Result<Side> {
    if !(rel > 0.0 && rel < opening) {
        return Err(Error::OutsideRegion);
    }
    Ok(if rng.uniform() < rel / opening {
        Side::Plus
    } else {
        Side::Minus
    })
}

/// Exit radius for a given uniform `u` in `(0, 1)`; strictly increasing in `u`.
///
/// Valid for any opening, not only `pi/m`.
pub fn exit_radius_from_uniform(r0: f64, rel: f64, opening: f64, side: Side, u: f64) -> f64 {
    let phi = PI * rel / opening;
    let (s, c) = phi.sin_cos();
    let base = match side {
        Side::Minus => {
            let psi = (PI - phi) * (u - 1.0);
            c - s * psi.cos() / psi.sin()
        }
        Side::Plus => {
            let psi = phi * (u - 1.0);
            -c - s * psi.cos() / psi.sin()
        }
    };
    r0 * base.powf(opening / PI)
}

pub fn sample_exit_radius(r0: f64, rel: f64, opening: f64, side: Side, rng: &mut RngStream) -> f64 {
    loop {
        let r = exit_radius_from_uniform(r0, rel, opening, side, rng.uniform());
        if r > 0.0 && r.is_finite() {
            return r;
        }
    }
}

/// Exit time given the exit radius, by acceptance-rejection against the
/// positive part of the signed mixture of inverse-exponential laws.
pub fn sample_exit_time(params: &ExitLawParams, r: f64, rng: &mut RngStream) -> Result<f64> {
    let cs = params.c(r);
    let sines: Vec<f64> = params.gammas.iter().map(|g| g.sin()).collect();
    let pos: Vec<usize> = (0..sines.len()).filter(|&k| sines[k] > 0.0).collect();
    assert!(!pos.is_empty(), "interior start has a positive exit component");
    let weights: Vec<f64> = pos.iter().map(|&k| sines[k] / cs[k]).collect();
    let total: f64 = weights.iter().sum();
    let c_min = pos.iter().map(|&k| cs[k]).fold(f64::INFINITY, f64::min);
    loop {
        let mut pick = rng.uniform() * total;
        let mut chosen = pos[pos.len() - 1];
        for (i, &k) in pos.iter().enumerate() {
            if pick < weights[i] {
                chosen = k;
                break;
            }
            pick -= weights[i];
        }
        let t = cs[chosen] / (2.0 * rng.exponential());
        let mut plus = 0.0;
        let mut minus = 0.0;
        for k in 0..sines.len() {
            let v = sines[k] * (-(cs[k] - c_min) / (2.0 * t)).exp();
            if v > 0.0 {
                plus += v;
            } else {
                minus -= v;
            }
        }
        let ratio = (plus - minus) / plus;
        if !(ratio >= -1e-12 && ratio <= 1.0 + 1e-12) {
            return Err(Error::AcceptanceRatio { ratio });
        }
        if rng.uniform() < ratio {
            return Ok(t);
        }
    }
}

/// `W_h` conditioned on staying in the `pi/m` wedge up to time `h`.
///
/// A free Gaussian step landing in an even image sector `2k` is rotated back
/// into the wedge; odd sectors are rejected. This proposes from the even-image
/// mixture restricted to the wedge, and the signed image sum over the even
/// sum is then the acceptance ratio.
pub fn sample_survivor(
    start: PolarPoint,
    w: &PiOverM,
    horizon: f64,
    rng: &mut RngStream,
) -> Result<PolarPoint> {
    let x0 = start.cartesian();
    let sd = horizon.sqrt();
    let two_h = 2.0 * horizon;
    let mut c = vec![0.0; 2 * w.m as usize];
    loop {
        let z = [x0[0] + sd * rng.normal(), x0[1] + sd * rng.normal()];
        let pz = PolarPoint::from_cartesian(z);
        let k = w.sector_of(pz.theta);
        if k % 2 == 1 {
            continue;
        }
        let y = PolarPoint::new(pz.r, w.unfold_from_sector(k, pz.theta));
        for (j, cj) in c.iter_mut().enumerate() {
            let a = w.image_angle(j as u32, y.theta);
            let s = (0.5 * (a - start.theta)).sin();
            *cj = (y.r - start.r).powi(2) + 4.0 * y.r * start.r * s * s;
        }
        let c_min = c.iter().step_by(2).copied().fold(f64::INFINITY, f64::min);
        let mut even = 0.0;
        let mut odd = 0.0;
        for (j, cj) in c.iter().enumerate() {
            let v = (-(cj - c_min) / two_h).exp();
            if j % 2 == 0 {
                even += v;
            } else {
                odd += v;
            }
        }
        let ratio = ((even - odd) / even).max(0.0);
        if ratio > 1.0 + 1e-12 {
            return Err(Error::AcceptanceRatio { ratio });
        }
        if rng.uniform() < ratio {
            return Ok(y);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_monotone_in_u() {
        for side in [Side::Minus, Side::Plus] {
            let mut prev = 0.0;
            for i in 1..1000 {
                let r = exit_radius_from_uniform(1.3, 0.4, 0.9, side, i as f64 / 1000.0);
                assert!(r > prev, "{side:?} at {i}");
                prev = r;
            }
        }
    }

    #[test]
    fn survivor_stays_inside() {
        let w = PiOverM::new(3, -0.2);
        let mut rng = RngStream::new(3);
        let start = PolarPoint::new(0.8, 0.3);
        for _ in 0..20_000 {
            let y = sample_survivor(start, &w, 0.7, &mut rng).unwrap();
            assert!(y.theta >= w.base && y.theta <= w.plus());
        }
    }

    #[test]
    fn exit_time_positive() {
        let w = PiOverM::new(4, 0.0);
        let mut rng = RngStream::new(8);
        let start = PolarPoint::new(1.0, 0.5);
        for side in [Side::Minus, Side::Plus] {
            let p = ExitLawParams::new(w, start, side);
            for _ in 0..2000 {
                let r = sample_exit_radius(1.0, 0.5, w.opening(), side, &mut rng);
                assert!(sample_exit_time(&p, r, &mut rng).unwrap() > 0.0);
            }
        }
    }
}
