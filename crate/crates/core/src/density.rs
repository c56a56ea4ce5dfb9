//! Closed-form transition densities and exit laws.
//!
//! Conventions: the image sums ([`reflected_density_images`],
//! [`killed_density_images`]) are densities per unit cartesian area `dy`.
//! The Bessel series ([`reflected_density_series`], [`killed_density_series`])
//! and the corner kernel are per `dr dtheta`, i.e. they include the Jacobian
//! `r`. Use [`area_to_polar`] and [`polar_to_area`] to move between the two.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{ensure_finite, Error, Result};
use crate::geometry::{PiOverM, PolarPoint, WedgeSpec};
use crate::quadrature::{integrate, integrate_2d, QuadOptions};
use crate::special::{log_bessel_i, power_series_parts, series_tail_cutoff, SeriesTolerance};

/// Boundary behaviour of the process.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Reflected,
    Killed,
}

/// One of the two rays of a wedge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}

pub fn area_to_polar(value: f64, r: f64) -> f64 {
    value * r
}

pub fn polar_to_area(value: f64, r: f64) -> f64 {
    value / r
}

/// `|x - y|^2` for two polar points, written to avoid cancellation.
fn squared_distance(r0: f64, theta0: f64, r: f64, theta: f64) -> f64 {
    let s = (0.5 * (theta - theta0)).sin();
    (r - r0) * (r - r0) + 4.0 * r * r0 * s * s
}

/// Sum of signed terms, large positives paired with large negatives first.
pub(crate) fn paired_sum(terms: &mut [f64]) -> f64 {
    let mut pos: Vec<f64> = terms.iter().copied().filter(|v| *v > 0.0).collect();
    let mut neg: Vec<f64> = terms.iter().copied().filter(|v| *v < 0.0).map(|v| -v).collect();
    pos.sort_by(|a, b| b.total_cmp(a));
    neg.sort_by(|a, b| b.total_cmp(a));
    let n = pos.len().max(neg.len());
    let mut sum = 0.0;
    for i in 0..n {
        sum += pos.get(i).copied().unwrap_or(0.0) - neg.get(i).copied().unwrap_or(0.0);
    }
    clamp_tiny_negative(sum)
}

fn clamp_tiny_negative(v: f64) -> f64 {
    if v < 0.0 && v > -1e-12 {
        0.0
    } else {
        v
    }
}

fn check_images_input(w: &PiOverM, x: PolarPoint, y: PolarPoint, t: f64) -> Result<()> {
    ensure_finite(&[x.r, x.theta, y.r, y.theta, t])?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    if x.r > 0.0 && !w.contains_angle(x.theta) || y.r > 0.0 && !w.contains_angle(y.theta) {
        return Err(Error::OutsideRegion);
    }
    Ok(())
}

fn image_terms(w: &PiOverM, x: PolarPoint, y: PolarPoint, t: f64) -> Vec<f64> {
    (0..2 * w.m)
        .map(|k| {
            let c = squared_distance(x.r, x.theta, y.r, w.image_angle(k, y.theta));
            (-c / (2.0 * t)).exp() / (2.0 * PI * t)
        })
        .collect()
}

/// `(1/2 pi t) sum_k exp(-|x - T_k y|^2 / 2t)`, per unit area.
pub fn reflected_density_images(w: &PiOverM, x: PolarPoint, y: PolarPoint, t: f64) -> Result<f64> {
    check_images_input(w, x, y, t)?;
    Ok(image_terms(w, x, y, t).iter().sum())
}

/// Alternating image sum, per unit area, written as
/// `exp(-(r - r0)^2 / 2t) / 2 pi t * sum_k (-1)^k exp(-2 z sin^2(d_k / 2))`
/// with `z = r r0 / t` and `d_k` the angle between `x` and the `k`-th image.
pub fn killed_density_images(w: &PiOverM, x: PolarPoint, y: PolarPoint, t: f64) -> Result<f64> {
    check_images_input(w, x, y, t)?;
    let z = x.r * y.r / t;
    // `exp(-2 z s_k^2)` summed as is, and with the unit parts cancelled
    // exactly through `expm1`; the better conditioned of the two is kept
    let mut plain = Vec::with_capacity(2 * w.m as usize);
    let mut shifted = Vec::with_capacity(2 * w.m as usize);
    for k in 0..2 * w.m {
        let s = (0.5 * (w.image_angle(k, y.theta) - x.theta)).sin();
        let a = -2.0 * z * s * s;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        plain.push(sign * a.exp());
        shifted.push(sign * a.exp_m1());
    }
    let conditioned = |terms: &mut Vec<f64>| {
        let magnitude: f64 = terms.iter().map(|v| v.abs()).sum();
        let sum = paired_sum(terms);
        (sum, magnitude / sum.abs())
    };
    let (a, ca) = conditioned(&mut plain);
    let (b, cb) = conditioned(&mut shifted);
    let (sum, conditioning) = if cb < ca { (b, cb) } else { (a, ca) };
    let radial = (-(y.r - x.r) * (y.r - x.r) / (2.0 * t)).exp() / (2.0 * PI * t);
    if sum != 0.0 && conditioning > 100.0 {
        // near the corner the images almost coincide and cancel to high
        // order; regrouping the sum by Fourier modes gives the Bessel series,
        // which is better conditioned there
        let wedge = WedgeSpec::new(w.base, w.plus())?;
        let (v, series_conditioning) =
            series_with_conditioning(Kind::Killed, &wedge, x, y, t, SeriesTolerance::default())?;
        if series_conditioning < conditioning {
            return Ok(polar_to_area(v, y.r));
        }
    }
    Ok(radial * sum)
}

fn check_series_input(wedge: &WedgeSpec, x: PolarPoint, y: PolarPoint, t: f64) -> Result<()> {
    ensure_finite(&[x.r, x.theta, y.r, y.theta, t])?;
    if !(t > 0.0) || x.r < 0.0 || y.r < 0.0 {
        return Err(Error::InvalidParameter(format!("bad series arguments (t = {t})")));
    }
    if !wedge.contains(x) || !wedge.contains(y) {
        return Err(Error::OutsideRegion);
    }
    Ok(())
}

/// `cos(a b)` with the rounding error of the product corrected to first order.
fn exact_cos(a: f64, b: f64) -> f64 {
    let p = a * b;
    let e = a.mul_add(b, -p);
    let (sn, cs) = p.sin_cos();
    cs - sn * e
}

fn exact_sin(a: f64, b: f64) -> f64 {
    let p = a * b;
    let e = a.mul_add(b, -p);
    let (sn, cs) = p.sin_cos();
    sn + cs * e
}

fn series_density(
    kind: Kind,
    wedge: &WedgeSpec,
    x: PolarPoint,
    y: PolarPoint,
    t: f64,
    tol: SeriesTolerance,
) -> Result<f64> {
    series_with_conditioning(kind, wedge, x, y, t, tol).map(|(v, _)| v)
}

/// Series value and `sum |terms| / |sum|`, the factor by which it amplifies
/// rounding.
fn series_with_conditioning(
    kind: Kind,
    wedge: &WedgeSpec,
    x: PolarPoint,
    y: PolarPoint,
    t: f64,
    tol: SeriesTolerance,
) -> Result<(f64, f64)> {
    check_series_input(wedge, x, y, t)?;
    let alpha = wedge.opening();
    let step = PI / alpha;
    let z = y.r * x.r / t;
    let gauss = (y.r * y.r + x.r * x.r) / (2.0 * t);
    let prefactor = 2.0 * y.r / (t * alpha);
    // terms are evaluated near machine precision: the sum can be far smaller
    // than its largest terms
    let term_tol = SeriesTolerance {
        rel_tol: 1e-17,
        ..tol
    };
    let th = wedge.relative_angle(y.theta);
    let th0 = wedge.relative_angle(x.theta);
    // moderate arguments: linear power-series sums against one shared
    // Gaussian factor, so rounding is not amplified term by term
    let linear = z < 300.0 && gauss < 700.0;
    let shared = (-gauss).exp();
    let magnitude = |nu: f64| -> Result<f64> {
        if z == 0.0 {
            Ok(if nu == 0.0 { shared } else { 0.0 })
        } else if linear {
            let (log_scale, sum) = power_series_parts(nu, z, term_tol)?;
            Ok(sum * log_scale.exp() * shared)
        } else {
            Ok((log_bessel_i(nu, z, term_tol)? - gauss).exp())
        }
    };
    let term = |n: usize| -> Result<f64> {
        let nu = n as f64 * step;
        let trig = match kind {
            Kind::Reflected => exact_cos(nu, th) * exact_cos(nu, th0),
            Kind::Killed => exact_sin(nu, th) * exact_sin(nu, th0),
        };
        Ok(magnitude(nu)? * trig)
    };
    let lead = 0.5 * magnitude(0.0)?;
    let mut terms = Vec::new();
    if kind == Kind::Reflected {
        terms.push(lead);
    }
    let mut done = 1;
    let mut rel_tol = tol.rel_tol;
    loop {
        let mut n_cut = series_tail_cutoff(step, z, SeriesTolerance { rel_tol, ..tol });
        if kind == Kind::Killed && z > 0.0 {
            // no constant term: the first mode sets the scale of the sum
            n_cut = n_cut.max(2);
        }
        if n_cut > tol.max_terms {
            return Err(Error::SeriesCapExceeded { max_terms: tol.max_terms });
        }
        for n in done..n_cut {
            terms.push(term(n)?);
        }
        done = done.max(n_cut);
        // the cutoff bounds the tail against `lead`; tighten it until the
        // bound holds against the sum itself
        let sum = paired_sum(&mut terms.clone()).abs();
        let wanted = tol.rel_tol * sum / lead;
        if sum == 0.0 || wanted >= rel_tol || rel_tol <= 1e-300 {
            break;
        }
        rel_tol = wanted.max(1e-300);
    }
    let magnitude: f64 = terms.iter().map(|v| v.abs()).sum();
    let sum = paired_sum(&mut terms);
    Ok((prefactor * sum, magnitude / sum.abs()))
}

/// Bessel-series density of the reflected motion, per `dr dtheta`.
pub fn reflected_density_series(
    wedge: &WedgeSpec,
    x: PolarPoint,
    y: PolarPoint,
    t: f64,
    tol: SeriesTolerance,
) -> Result<f64> {
    series_density(Kind::Reflected, wedge, x, y, t, tol)
}

/// Bessel-series density of the killed motion, per `dr dtheta`.
pub fn killed_density_series(
    wedge: &WedgeSpec,
    x: PolarPoint,
    y: PolarPoint,
    t: f64,
    tol: SeriesTolerance,
) -> Result<f64> {
    series_density(Kind::Killed, wedge, x, y, t, tol)
}

/// Exit law of a `pi/m` wedge for a fixed start and exit ray.
#[derive(Clone, Debug)]
pub struct ExitLawParams {
    pub wedge: PiOverM,
    pub start: PolarPoint,
    pub side: Side,
    pub gammas: Vec<f64>,
}

impl ExitLawParams {
    pub fn new(wedge: PiOverM, start: PolarPoint, side: Side) -> Self {
        let m = wedge.m;
        let rel = start.theta - wedge.base;
        let gammas = (0..m)
            .map(|k| {
                let shift = 2.0 * k as f64 * PI / m as f64;
                match side {
                    Side::Minus => rel - shift,
                    Side::Plus => wedge.opening() + shift - rel,
                }
            })
            .collect();
        ExitLawParams { wedge, start, side, gammas }
    }

    /// `c_k = (r - r0 cos g_k)^2 + r0^2 sin^2 g_k` at exit radius `r`.
    pub fn c(&self, r: f64) -> Vec<f64> {
        let r0 = self.start.r;
        self.gammas
            .iter()
            .map(|&g| {
                let s = (0.5 * g).sin();
                (r - r0) * (r - r0) + 4.0 * r * r0 * s * s
            })
            .collect()
    }

    /// Probability of leaving through this side.
    pub fn side_probability(&self) -> f64 {
        let p_plus = (self.start.theta - self.wedge.base) / self.wedge.opening();
        match self.side {
            Side::Plus => p_plus,
            Side::Minus => 1.0 - p_plus,
        }
    }
}

/// Joint density of `(tau, r_tau)` on the chosen side, per `dr dt`.
pub fn exit_joint_density(params: &ExitLawParams, r: f64, t: f64) -> f64 {
    let r0 = params.start.r;
    let cs = params.c(r);
    let mut terms: Vec<f64> = params
        .gammas
        .iter()
        .zip(&cs)
        .map(|(g, c)| {
            if *c == 0.0 {
                f64::INFINITY
            } else {
                g.sin() * (-c / (2.0 * t)).exp()
            }
        })
        .collect();
    if terms.iter().any(|v| v.is_infinite()) {
        return f64::INFINITY;
    }
    r0 / (2.0 * PI * t * t) * paired_sum(&mut terms)
}

/// Exit-radius density on the chosen side, `int_0^inf joint dt`.
pub fn exit_radius_density(params: &ExitLawParams, r: f64) -> f64 {
    let r0 = params.start.r;
    let cs = params.c(r);
    let mut terms: Vec<f64> = params.gammas.iter().zip(&cs).map(|(g, c)| g.sin() / c).collect();
    r0 / PI * paired_sum(&mut terms)
}

/// Change-of-measure factor of the one-dimensional reflected or killed motion
/// on `[0, inf)` against a free Gaussian endpoint `w` started at `x0`:
/// `1_{w > 0} (1 +- exp(-2 x0 w / T))`.
pub fn one_dim_factor(kind: Kind, x0: f64, w: f64, t: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let a = -2.0 * x0 * w / t;
    match kind {
        Kind::Reflected => 1.0 + a.exp(),
        Kind::Killed => -a.exp_m1(),
    }
}

/// One-dimensional transition density on `[0, inf)`.
pub fn one_dim_density(kind: Kind, x0: f64, w: f64, t: f64) -> f64 {
    let g = (-(w - x0) * (w - x0) / (2.0 * t)).exp() / (2.0 * PI * t).sqrt();
    g * one_dim_factor(kind, x0, w, t)
}

/// Leading term of the series at start radius `r_n` over remaining time
/// `t_prime`, per `dr dtheta`:
/// `(r / t' alpha) exp(-(r^2 + r_n^2) / 2t') I_0(r r_n / t')`.
///
/// Integrated over the wedge it has mass exactly one (the radial part is a
/// Rice density), which sits inside the bounds of [`corner_normalizer_bounds`].
pub fn corner_kernel(r_n: f64, t_prime: f64, alpha: f64, r: f64, _theta: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let z = r * r_n / t_prime;
    let log_i0 = log_bessel_i(0.0, z, SeriesTolerance::default()).unwrap_or(z);
    r / (t_prime * alpha) * (log_i0 - (r * r + r_n * r_n) / (2.0 * t_prime)).exp()
}

/// `(lower, upper)` bounds on the normalizing constant of [`corner_kernel`]:
/// `1 / (e^{-a} + r_n sqrt(2 pi / t') Phi(r_n / sqrt t')) <= C <= e^{a}` with
/// `a = r_n^2 / 2t'`.
pub fn corner_normalizer_bounds(r_n: f64, t_prime: f64) -> (f64, f64) {
    let a = r_n * r_n / (2.0 * t_prime);
    let mass = (-a).exp() + r_n * (2.0 * PI / t_prime).sqrt() * normal_cdf(r_n / t_prime.sqrt());
    (1.0 / mass, a.exp())
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// `P(tau > t)` for the `pi/m` wedge, by quadrature of the killed density.
pub fn survival_probability(w: &PiOverM, x: PolarPoint, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    integrate_over_wedge(w, x, t, Kind::Killed)
}

/// Mass of the image density over the wedge, by polar quadrature on
/// `r < r0 + 8 sqrt t`. Radial breakpoints at `r0` keep the peak resolved.
pub fn integrate_over_wedge(w: &PiOverM, x: PolarPoint, t: f64, kind: Kind) -> Result<f64> {
    let r_max = x.r + 8.0 * t.sqrt();
    let opts = QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-10,
        max_intervals: 4000,
    };
    let f = |r: f64, th: f64| {
        let y = PolarPoint::new(r, th);
        let d = match kind {
            Kind::Reflected => reflected_density_images(w, x, y, t),
            Kind::Killed => killed_density_images(w, x, y, t),
        };
        d.map(|v| v * r).unwrap_or(f64::NAN)
    };
    let mut total = 0.0;
    let mut cuts = vec![0.0];
    if x.r > 0.0 && x.r < r_max {
        cuts.push(x.r);
    }
    cuts.push(r_max);
    for pair in cuts.windows(2) {
        total += integrate_2d(f, (pair[0], pair[1]), (w.base, w.plus()), opts)?;
    }
    Ok(total)
}

/// Exit-radius CDF on one side via quadrature of [`exit_radius_density`],
/// normalized by the side probability.
pub fn exit_radius_cdf(params: &ExitLawParams, r: f64) -> Result<f64> {
    let f = |s: f64| exit_radius_density(params, s);
    let v = integrate(f, 0.0, r, QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 4000 })?;
    Ok(v / params.side_probability())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn half_plane_example() {
        let w = PiOverM::new(1, 0.0);
        let p = PolarPoint::new(1.0, PI / 2.0);
        let v = reflected_density_images(&w, p, p, 1.0).unwrap();
        assert!((v - (1.0 + (-2.0f64).exp()) / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn quadrant_factorizes() {
        let w = PiOverM::new(2, 0.0);
        let mut g = rng();
        for _ in 0..100 {
            let x = [g.random_range(0.01..3.0), g.random_range(0.01..3.0)];
            let y = [g.random_range(0.01..3.0), g.random_range(0.01..3.0)];
            let t = g.random_range(0.05..2.0);
            let (px, py) = (PolarPoint::from_cartesian(x), PolarPoint::from_cartesian(y));
            for kind in [Kind::Reflected, Kind::Killed] {
                let want = one_dim_density(kind, x[0], y[0], t) * one_dim_density(kind, x[1], y[1], t);
                let got = match kind {
                    Kind::Reflected => reflected_density_images(&w, px, py, t),
                    Kind::Killed => killed_density_images(&w, px, py, t),
                }
                .unwrap();
                assert!((got - want).abs() <= 1e-10 * want.abs().max(1e-300) + 1e-300, "{kind:?}");
            }
        }
    }

    #[test]
    fn killed_vanishes_on_rays() {
        let w = PiOverM::new(3, 0.4);
        let x = PolarPoint::new(1.2, 0.7);
        for r in [0.1, 0.8, 2.0] {
            for th in [w.base, w.plus()] {
                let v = killed_density_images(&w, x, PolarPoint::new(r, th), 0.5).unwrap();
                assert!(v.abs() <= 1e-12, "{v}");
            }
        }
    }

    #[test]
    fn series_at_origin_start() {
        let wedge = WedgeSpec::with_opening(1.3).unwrap();
        let x = PolarPoint::new(0.0, 0.0);
        let tol = SeriesTolerance::default();
        for th in [0.0, 0.4, 1.3] {
            let y = PolarPoint::new(0.9, th);
            let v = reflected_density_series(&wedge, x, y, 0.6, tol).unwrap();
            let want = 0.9 / (0.6 * 1.3) * (-0.81f64 / 1.2).exp();
            assert!((v - want).abs() < 1e-14);
        }
    }

    #[test]
    fn series_symmetry_and_ordering() {
        let wedge = WedgeSpec::with_opening(2.2).unwrap();
        let tol = SeriesTolerance::default();
        let mut g = rng();
        for _ in 0..30 {
            let x = PolarPoint::new(g.random_range(0.1..2.0), g.random_range(0.0..2.2));
            let y = PolarPoint::new(g.random_range(0.1..2.0), g.random_range(0.0..2.2));
            let t = g.random_range(0.2..1.5);
            let a = reflected_density_series(&wedge, x, y, t, tol).unwrap() / y.r;
            let b = reflected_density_series(&wedge, y, x, t, tol).unwrap() / x.r;
            assert!((a - b).abs() < 1e-12 * a);
            let k = killed_density_series(&wedge, x, y, t, tol).unwrap();
            assert!(k <= a * y.r * (1.0 + 1e-12));
        }
    }

    #[test]
    fn exit_density_half_plane_cauchy() {
        let w = PiOverM::new(1, 0.0);
        let p = ExitLawParams::new(w, PolarPoint::new(1.0, PI / 2.0), Side::Minus);
        for r in [0.2, 1.0, 3.0] {
            let v = integrate(|t| exit_joint_density(&p, r, t), 1e-9, 50.0, QuadOptions::default()).unwrap()
                + integrate(|u| exit_joint_density(&p, r, 1.0 / u) / (u * u), 1e-9, 0.02, QuadOptions::default())
                    .unwrap();
            let want = 1.0 / (PI * (1.0 + r * r));
            assert!((v - want).abs() < 1e-8, "{v} vs {want}");
            assert!((exit_radius_density(&p, r) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn exit_side_mass() {
        let w = PiOverM::new(3, 0.2);
        let start = PolarPoint::new(1.1, 0.2 + 0.37);
        let p = ExitLawParams::new(w, start, Side::Plus);
        let mass = exit_radius_cdf(&p, 1e4).unwrap() * p.side_probability();
        // tail beyond 1e4 decays like r^-(1 + m)
        assert!((mass - 0.37 / (PI / 3.0)).abs() < 1e-6, "{mass}");
    }

    #[test]
    fn one_dim_factor_examples() {
        assert_eq!(one_dim_factor(Kind::Killed, 0.0, 0.4, 1.0), 0.0);
        assert_eq!(one_dim_factor(Kind::Reflected, 0.0, 0.4, 1.0), 2.0);
        assert_eq!(one_dim_factor(Kind::Reflected, 1.0, -0.4, 1.0), 0.0);
    }

    #[test]
    fn corner_kernel_shape() {
        let alpha = 0.9;
        let a = corner_kernel(0.3, 0.5, alpha, 0.7, 0.1);
        let b = corner_kernel(0.3, 0.5, alpha, 0.7, 0.8);
        assert_eq!(a, b);
        let ray = corner_kernel(0.0, 0.5, alpha, 0.7, 0.0);
        assert!((ray - 0.7 / (0.5 * alpha) * (-0.49f64).exp()).abs() < 1e-15);
        let mass = integrate(|r| alpha * corner_kernel(0.3, 0.5, alpha, r, 0.0), 0.0, 10.0, QuadOptions::default())
            .unwrap();
        let (lo, hi) = corner_normalizer_bounds(0.3, 0.5);
        assert!(lo <= 1.0 / mass && 1.0 / mass <= hi);
        assert!(hi <= (0.09f64 / 1.0).exp());
    }

    #[test]
    fn survival_quadrant_matches_erf() {
        let w = PiOverM::new(2, 0.0);
        let x = [0.6, 1.1];
        let t = 0.8;
        let got = survival_probability(&w, PolarPoint::from_cartesian(x), t).unwrap();
        let want = libm::erf(x[0] / (2.0 * t).sqrt()) * libm::erf(x[1] / (2.0 * t).sqrt());
        assert!((got - want).abs() < 1e-7, "{got} vs {want}");
    }

    #[test]
    fn paired_sum_clamps() {
        assert_eq!(paired_sum(&mut [1.0, -1.0 - 1e-14]), 0.0);
        assert_eq!(paired_sum(&mut [3.0, -1.0, 0.5]), 2.5);
    }
}
