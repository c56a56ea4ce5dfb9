use std::f64::consts::PI;

use super::exit::{sample_exit_radius, sample_exit_time, sample_survivor};
use super::{PathSample, DEFAULT_FOLD_CAP};
use crate::corner::{corner_triggered, sample_corner, sample_driving_angle, CornerState};
use crate::density::{ExitLawParams, Side};
use crate::error::{ensure_finite, Error, Result};
use crate::geometry::{fold_into_wedge, sub_wedge_index, Mat2, PiOverM, PolarPoint, ANGLE_TOL};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReflectedOptions {
    /// Corner threshold; zero disables the approximation.
    pub epsilon: f64,
    pub fold_cap: u64,
}

impl Default for ReflectedOptions {
    fn default() -> Self {
        ReflectedOptions {
            epsilon: crate::corner::DEFAULT_EPSILON,
            fold_cap: DEFAULT_FOLD_CAP,
        }
    }
}

fn mirror(angle: f64) -> Mat2 {
    let (s, c) = (2.0 * angle).sin_cos();
    Mat2([[c, s], [s, -c]])
}

/// Normally reflected Brownian motion in `<0, alpha>` at time `horizon`.
///
/// Each iteration stops the motion on a `pi/m` wedge centred at the current
/// angle and folds the exit point back into `<0, alpha>`. The driving
/// (unfolded) Brownian endpoint is carried along: it is the current point
/// mapped through the product of the mirrors applied so far.
pub fn algorithm_ii(
    start: PolarPoint,
    horizon: f64,
    alpha: f64,
    opts: ReflectedOptions,
    rng: &mut RngStream,
) -> Result<PathSample> {
    ensure_finite(&[start.r, start.theta, alpha, horizon, opts.epsilon])?;
    if !(horizon > 0.0) || !(alpha > 0.0 && alpha < 2.0 * PI) || opts.epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "need horizon > 0, alpha in (0, 2pi), epsilon >= 0, got {horizon}, {alpha}, {}",
            opts.epsilon
        )));
    }
    if start.theta < -ANGLE_TOL || start.theta > alpha + ANGLE_TOL || start.r < 0.0 {
        return Err(Error::OutsideRegion);
    }
    if start.r == 0.0 {
        let p = sample_reflected_from_origin(horizon, alpha, rng);
        let w = PolarPoint::new(p.r, sample_driving_angle(rng));
        return Ok(PathSample {
            endpoint: p,
            elapsed: horizon,
            boundary: None,
            folds: 0,
            log_weight: 0.0,
            approx_used: false,
            driving_endpoint: Some(w.cartesian()),
        });
    }

    let m = sub_wedge_index(alpha);
    let big = PI / m as f64;
    let mut r = start.r;
    let mut theta = start.theta.clamp(0.0, alpha);
    let mut now = 0.0;
    let mut folds = 0u64;
    let mut unfold = Mat2::IDENTITY;

    loop {
        let remaining = horizon - now;
        if corner_triggered(r, remaining, opts.epsilon) {
            let state = CornerState {
                r_n: r,
                t_prime: remaining,
                alpha,
                epsilon: opts.epsilon,
            };
            let (p, _) = sample_corner(&state, rng)?;
            let w = PolarPoint::new(p.r, sample_driving_angle(rng));
            return Ok(PathSample {
                endpoint: p,
                elapsed: horizon,
                boundary: None,
                folds: folds + 1,
                log_weight: 0.0,
                approx_used: true,
                driving_endpoint: Some(w.cartesian()),
            });
        }
        let here = PolarPoint::new(r, theta);
        if folds >= opts.fold_cap {
            return Err(Error::IterationCap {
                cap: opts.fold_cap,
                partial: Box::new(PathSample {
                    endpoint: here,
                    elapsed: now,
                    boundary: None,
                    folds,
                    log_weight: 0.0,
                    approx_used: false,
                    driving_endpoint: Some(unfold.apply(here.cartesian())),
                }),
            });
        }
        folds += 1;

        let sub = PiOverM::new(m, theta - 0.5 * big);
        let side = if rng.uniform() < 0.5 { Side::Plus } else { Side::Minus };
        let r_exit = sample_exit_radius(r, 0.5 * big, big, side, rng);
        let params = ExitLawParams::new(sub, here, side);
        let tau = sample_exit_time(&params, r_exit, rng)?;

        let (z, last) = if now + tau >= horizon {
            (sample_survivor(here, &sub, remaining, rng)?, true)
        } else {
            let th = match side {
                Side::Minus => sub.base,
                Side::Plus => sub.plus(),
            };
            (PolarPoint::new(r_exit, th), false)
        };
        let folded = fold_into_wedge(z.theta, alpha);
        let driving = unfold.apply(z.cartesian());
        if z.theta < 0.0 {
            unfold = unfold.mul(&mirror(0.0));
        } else if z.theta > alpha {
            unfold = unfold.mul(&mirror(alpha));
        }
        if last {
            return Ok(PathSample {
                endpoint: PolarPoint::new(z.r, folded),
                elapsed: horizon,
                boundary: None,
                folds,
                log_weight: 0.0,
                approx_used: false,
                driving_endpoint: Some(driving),
            });
        }
        now += tau;
        r = z.r;
        theta = folded;
    }
}

/// Reflected motion started at the corner: Rayleigh radius, uniform angle.
pub fn sample_reflected_from_origin(horizon: f64, alpha: f64, rng: &mut RngStream) -> PolarPoint {
    let r = (2.0 * horizon * rng.exponential()).sqrt();
    PolarPoint::new(r, alpha * rng.uniform())
}

/// Reflected motion in `<0, pi/m>` by folding a free Gaussian endpoint.
pub fn direct_pi_over_m_reflected(
    start: [f64; 2],
    horizon: f64,
    m: u32,
    rng: &mut RngStream,
) -> PolarPoint {
    let sd = horizon.sqrt();
    let b = [start[0] + sd * rng.normal(), start[1] + sd * rng.normal()];
    let p = PolarPoint::from_cartesian(b);
    let w = PiOverM::new(m, 0.0);
    let k = w.sector_of(p.theta);
    PolarPoint::new(p.r, w.unfold_from_sector(k, p.theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_stay_in_wedge() {
        let mut rng = RngStream::new(21);
        for alpha in [0.9, 0.58, 2.0, 5.0] {
            for eps in [0.0, 0.03] {
                let opts = ReflectedOptions { epsilon: eps, fold_cap: 10_000 };
                for _ in 0..500 {
                    match algorithm_ii(PolarPoint::new(1.5, 0.3), 1.0, alpha, opts, &mut rng) {
                        Ok(s) => {
                            assert!(s.endpoint.theta >= 0.0 && s.endpoint.theta <= alpha);
                            let d = s.driving_endpoint.unwrap();
                            assert!((d[0].hypot(d[1]) - s.endpoint.r).abs() < 1e-9 * s.endpoint.r.max(1.0));
                        }
                        Err(Error::IterationCap { .. }) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn direct_sampler_in_wedge() {
        let mut rng = RngStream::new(22);
        for m in 1..6 {
            for _ in 0..1000 {
                let p = direct_pi_over_m_reflected([1.0, 0.2], 1.0, m, &mut rng);
                assert!(p.theta >= 0.0 && p.theta <= PI / m as f64 + 1e-12);
            }
        }
    }
}
