//! Constant drift by Girsanov reweighting, and frozen-coefficient Euler
//! schemes for Itô processes stopped or reflected in a wedge.

use std::f64::consts::PI;

use crate::error::{ensure_finite, Error, Result};
use crate::geometry::{map_wedge, Mat2, PolarPoint, ANGLE_TOL};
use crate::rng::RngStream;
use crate::sampler::{algorithm_i, algorithm_ii, PathSample, ReflectedOptions};

/// `b . d - |b|^2 elapsed / 2` for a driving displacement `d = W - x0`.
pub fn girsanov_log_weight(b: [f64; 2], displacement: [f64; 2], elapsed: f64) -> f64 {
    if b == [0.0, 0.0] {
        return 0.0;
    }
    b[0] * displacement[0] + b[1] * displacement[1] - 0.5 * (b[0] * b[0] + b[1] * b[1]) * elapsed
}

/// `(weight, log weight)`.
pub fn girsanov_weight(b: [f64; 2], displacement: [f64; 2], elapsed: f64) -> (f64, f64) {
    let l = girsanov_log_weight(b, displacement, elapsed);
    (l.exp(), l)
}

fn displacement(sample: &PathSample, start: PolarPoint) -> [f64; 2] {
    let w = sample.driving_endpoint.unwrap_or_else(|| sample.cartesian());
    let x0 = start.cartesian();
    [w[0] - x0[0], w[1] - x0[1]]
}

/// Stopped Brownian motion with drift `b` in `<0, alpha>`: the driftless
/// path with its Girsanov weight attached.
pub fn stopped_with_drift(
    start: PolarPoint,
    b: [f64; 2],
    horizon: f64,
    alpha: f64,
    fold_cap: u64,
    rng: &mut RngStream,
) -> Result<PathSample> {
    ensure_finite(&b)?;
    let mut s = algorithm_i(start, horizon, alpha, fold_cap, rng)?;
    s.log_weight = girsanov_log_weight(b, displacement(&s, start), s.elapsed);
    Ok(s)
}

/// Reflected Brownian motion with drift `b` in `<0, alpha>`, weighted through
/// the driving Brownian endpoint.
pub fn reflected_with_drift(
    start: PolarPoint,
    b: [f64; 2],
    horizon: f64,
    alpha: f64,
    opts: ReflectedOptions,
    rng: &mut RngStream,
) -> Result<PathSample> {
    ensure_finite(&b)?;
    let mut s = algorithm_ii(start, horizon, alpha, opts, rng)?;
    s.log_weight = girsanov_log_weight(b, displacement(&s, start), horizon);
    Ok(s)
}

/// Drift and diffusion coefficients of `dY = b(Y, t) dt + sigma(Y, t) dW`.
pub trait CoefficientField: Sync {
    fn drift(&self, x: [f64; 2], t: f64) -> [f64; 2];
    fn diffusion(&self, x: [f64; 2], t: f64) -> Mat2;
}

/// `b(x) = -mu (x - kappa)` componentwise with constant `sigma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearField {
    pub mu: [f64; 2],
    pub kappa: [f64; 2],
    pub sigma: Mat2,
}

impl CoefficientField for LinearField {
    fn drift(&self, x: [f64; 2], _t: f64) -> [f64; 2] {
        [-self.mu[0] * (x[0] - self.kappa[0]), -self.mu[1] * (x[1] - self.kappa[1])]
    }

    fn diffusion(&self, _x: [f64; 2], _t: f64) -> Mat2 {
        self.sigma
    }
}

/// `0 = t_0 < t_1 < ... < t_L = T`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        ensure_finite(&times)?;
        let ok = times.len() >= 2 && times[0] == 0.0 && times.windows(2).all(|w| w[1] > w[0]);
        if !ok {
            return Err(Error::InvalidParameter(
                "time grid must start at 0 and increase strictly".into(),
            ));
        }
        Ok(TimeGrid { times })
    }

    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !(horizon > 0.0) {
            return Err(Error::InvalidParameter(format!("grid ({horizon}, {steps})")));
        }
        let mut times: Vec<f64> = (0..steps).map(|k| horizon * k as f64 / steps as f64).collect();
        times.push(horizon);
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }
}

/// Polar form of a point of the closed wedge `<0, alpha>`, with round-off
/// across a ray snapped back onto it.
fn polar_in_wedge(x: [f64; 2], alpha: f64) -> PolarPoint {
    let p = PolarPoint::from_cartesian(x);
    let th = if p.theta <= alpha {
        p.theta
    } else if p.theta - alpha < 0.5 * (2.0 * PI - alpha) {
        alpha
    } else {
        0.0
    };
    PolarPoint::new(p.r, th)
}

/// Frozen coefficients of one cell mapped to standard coordinates.
struct Cell {
    alpha: f64,
    from_std: Mat2,
    start: PolarPoint,
    drift: [f64; 2],
}

fn freeze<F: CoefficientField + ?Sized>(coeffs: &F, y: [f64; 2], t: f64, alpha: f64) -> Result<Cell> {
    let sigma = coeffs.diffusion(y, t);
    let a = sigma.inverse().ok_or(Error::SingularMatrix)?;
    let (wedge, to_std) = map_wedge(&a, alpha)?;
    let from_std = to_std.inverse().ok_or(Error::SingularMatrix)?;
    let alpha_std = wedge.opening();
    Ok(Cell {
        alpha: alpha_std,
        from_std,
        start: polar_in_wedge(to_std.apply(y), alpha_std),
        drift: to_std.apply(coeffs.drift(y, t)),
    })
}

/// Euler scheme stopped at the boundary of `<0, alpha>`.
///
/// In each cell the coefficients are frozen at the left end, the cell is
/// mapped to standard coordinates, and the drifted Brownian motion is run
/// exactly there. The scheme halts in the first cell whose path hits a ray.
pub fn euler_stopped<F: CoefficientField + ?Sized>(
    coeffs: &F,
    start: [f64; 2],
    grid: &TimeGrid,
    alpha: f64,
    fold_cap: u64,
    rng: &mut RngStream,
) -> Result<PathSample> {
    let mut y = start;
    let mut log_weight = 0.0;
    let mut folds = 0;
    for w in grid.times().windows(2) {
        let (t0, dt) = (w[0], w[1] - w[0]);
        let cell = freeze(coeffs, y, t0, alpha)?;
        let s = stopped_with_drift(cell.start, cell.drift, dt, cell.alpha, fold_cap, rng)?;
        log_weight += s.log_weight;
        folds += s.folds;
        y = cell.from_std.apply(s.cartesian());
        if let Some(side) = s.boundary {
            let theta = match side {
                crate::density::Side::Minus => 0.0,
                crate::density::Side::Plus => alpha,
            };
            return Ok(PathSample {
                endpoint: PolarPoint::new(y[0].hypot(y[1]), theta),
                elapsed: t0 + s.elapsed,
                boundary: Some(side),
                folds,
                log_weight,
                approx_used: false,
                driving_endpoint: None,
            });
        }
    }
    Ok(PathSample {
        endpoint: polar_in_wedge(y, alpha),
        elapsed: grid.horizon(),
        boundary: None,
        folds,
        log_weight,
        approx_used: false,
        driving_endpoint: None,
    })
}

/// Euler scheme reflected on the boundary of `<0, alpha>`; cell weights
/// multiply.
pub fn euler_reflected<F: CoefficientField + ?Sized>(
    coeffs: &F,
    start: [f64; 2],
    grid: &TimeGrid,
    alpha: f64,
    opts: ReflectedOptions,
    rng: &mut RngStream,
) -> Result<PathSample> {
    let mut y = start;
    let mut log_weight = 0.0;
    let mut folds = 0;
    let mut approx_used = false;
    for w in grid.times().windows(2) {
        let (t0, dt) = (w[0], w[1] - w[0]);
        let cell = freeze(coeffs, y, t0, alpha)?;
        let s = reflected_with_drift(cell.start, cell.drift, dt, cell.alpha, opts, rng)?;
        log_weight += s.log_weight;
        folds += s.folds;
        approx_used |= s.approx_used;
        y = cell.from_std.apply(s.cartesian());
    }
    let p = polar_in_wedge(y, alpha);
    debug_assert!(p.theta >= -ANGLE_TOL && p.theta <= alpha + ANGLE_TOL);
    Ok(PathSample {
        endpoint: p,
        elapsed: grid.horizon(),
        boundary: None,
        folds,
        log_weight,
        approx_used,
        driving_endpoint: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_drift_weight_is_one() {
        assert_eq!(girsanov_weight([0.0, 0.0], [3.0, -1.0], 0.7), (1.0, 0.0));
        let (w, l) = girsanov_weight([0.3, -0.2], [1.0, 1.0], 1.0);
        assert!(w > 0.0 && (l - (0.1 - 0.065)).abs() < 1e-15);
    }

    #[test]
    fn zero_drift_reproduces_algorithm_i() {
        let start = PolarPoint::new(1.5, 0.3);
        for seed in 0..50 {
            let a = algorithm_i(start, 1.0, 0.9, 1000, &mut RngStream::new(seed)).unwrap();
            let b = stopped_with_drift(start, [0.0, 0.0], 1.0, 0.9, 1000, &mut RngStream::new(seed)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(TimeGrid::new(vec![0.1, 1.0]).is_err());
        let g = TimeGrid::uniform(1.0, 4).unwrap();
        assert_eq!(g.times(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn euler_endpoints_in_wedge() {
        let field = LinearField {
            mu: [0.1, 0.2],
            kappa: [0.7, 0.5],
            sigma: Mat2([[1.0, 0.3], [0.0, 0.8]]),
        };
        let grid = TimeGrid::uniform(1.0, 20).unwrap();
        let x0 = PolarPoint::new(1.5, 0.3).cartesian();
        let mut rng = RngStream::new(5);
        for _ in 0..300 {
            let s = euler_stopped(&field, x0, &grid, 0.9, 10_000, &mut rng).unwrap();
            assert!(s.endpoint.theta >= 0.0 && s.endpoint.theta <= 0.9);
            let s = euler_reflected(&field, x0, &grid, 0.9, ReflectedOptions::default(), &mut rng).unwrap();
            assert!(s.endpoint.theta >= 0.0 && s.endpoint.theta <= 0.9);
        }
    }
}
