//! Termination kernel for paths that come close to the corner.
//!
//! When `r_n^2 / (T - T_n) < epsilon` the reflected density from `y_n` is
//! replaced by the leading term of its Bessel series: the angle becomes
//! uniform on the wedge and the radius follows
//! `r exp(-(r^2 + r_n^2) / 2t') I_0(r r_n / t')`. That radius is drawn by
//! acceptance-rejection from the reference density `r exp(-(r - r_n)^2 / 2t')`,
//! itself sampled by inverting its closed-form CDF.

use std::f64::consts::{PI, TAU};

use crate::density::normal_cdf;
use crate::error::{Error, Result};
use crate::geometry::PolarPoint;
use crate::rng::RngStream;
use crate::special::{bessel_i_scaled, SeriesTolerance};

/// Default corner threshold.
pub const DEFAULT_EPSILON: f64 = 0.03;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerState {
    pub r_n: f64,
    pub t_prime: f64,
    pub alpha: f64,
    pub epsilon: f64,
}

impl CornerState {
    pub fn triggered(&self) -> bool {
        corner_triggered(self.r_n, self.t_prime, self.epsilon)
    }
}

pub fn corner_triggered(r_n: f64, t_prime: f64, epsilon: f64) -> bool {
    epsilon > 0.0 && r_n * r_n / t_prime < epsilon
}

/// Unnormalized CDF of `r exp(-(r - r_n)^2 / 2t)` on `(0, r]`.
pub fn reference_cdf(r_n: f64, t: f64, r: f64) -> f64 {
    let st = t.sqrt();
    let g0 = (-r_n * r_n / (2.0 * t)).exp();
    let g = (-(r - r_n) * (r - r_n) / (2.0 * t)).exp();
    t * (g0 - g) + r_n * (TAU * t).sqrt() * (normal_cdf((r - r_n) / st) - normal_cdf(-r_n / st))
}

/// Total mass `t exp(-r_n^2 / 2t) + r_n sqrt(2 pi t) Phi(r_n / sqrt t)`.
pub fn reference_mass(r_n: f64, t: f64) -> f64 {
    t * (-r_n * r_n / (2.0 * t)).exp() + r_n * (TAU * t).sqrt() * normal_cdf(r_n / t.sqrt())
}

fn reference_pdf(r_n: f64, t: f64, r: f64) -> f64 {
    r * (-(r - r_n) * (r - r_n) / (2.0 * t)).exp()
}

/// Radius with normalized reference CDF equal to `u`, by Newton steps
/// safeguarded with bisection. Accurate to `1e-12` in CDF value.
pub fn invert_reference_cdf(r_n: f64, t: f64, u: f64) -> f64 {
    let mass = reference_mass(r_n, t);
    let target = u * mass;
    let st = t.sqrt();
    let mut lo = 0.0;
    let mut hi = r_n + 2.0 * st;
    while reference_cdf(r_n, t, hi) < target {
        lo = hi;
        hi += 2.0 * st;
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..100 {
        let f = reference_cdf(r_n, t, r) - target;
        if f.abs() <= 1e-13 * mass {
            return r;
        }
        if f > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let d = reference_pdf(r_n, t, r);
        let newton = r - f / d;
        r = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    r
}

pub fn sample_reference_radius(r_n: f64, t_prime: f64, rng: &mut RngStream) -> f64 {
    invert_reference_cdf(r_n, t_prime, rng.uniform())
}

/// Draws the approximate terminal point and reports the number of
/// acceptance-rejection trials used.
pub fn sample_corner(state: &CornerState, rng: &mut RngStream) -> Result<(PolarPoint, u32)> {
    let tol = SeriesTolerance::default();
    let mut trials = 0;
    loop {
        trials += 1;
        let r = sample_reference_radius(state.r_n, state.t_prime, rng);
        let ratio = bessel_i_scaled(0.0, r * state.r_n / state.t_prime, tol)?;
        if !(ratio > 0.0 && ratio <= 1.0 + 1e-12) {
            return Err(Error::AcceptanceRatio { ratio });
        }
        if rng.uniform() < ratio {
            let theta = state.alpha * rng.uniform();
            return Ok((PolarPoint::new(r, theta), trials));
        }
    }
}

/// Angle of the driving Brownian endpoint on the corner branch.
pub fn sample_driving_angle(rng: &mut RngStream) -> f64 {
    2.0 * PI * rng.uniform()
}
