//! Wedges, polar points, the decorrelating change of variables and the
//! image isometries of the `pi/m` tiling.
//!
//! Every sampler works in standard coordinates: an uncorrelated Brownian
//! motion in a wedge `<0, alpha>`. A correlated problem is brought there by
//! [`decorrelate`], which applies the inverse Cholesky factor of the
//! covariance.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use crate::error::{ensure_finite, Error, Result};

/// Absolute angular tolerance used for ray membership.
pub const ANGLE_TOL: f64 = 1e-12;

/// Tolerance on `|opening - pi/m|` for accepting a wedge as a `pi/m` wedge.
pub const PI_OVER_M_TOL: f64 = 1e-9;

/// A wedge `<alpha_minus, alpha_plus>` in standard coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WedgeSpec {
    alpha_minus: f64,
    alpha_plus: f64,
}

impl WedgeSpec {
    pub fn new(alpha_minus: f64, alpha_plus: f64) -> Result<Self> {
        ensure_finite(&[alpha_minus, alpha_plus])?;
        let opening = alpha_plus - alpha_minus;
        if alpha_minus < 0.0 || alpha_plus > TAU || opening <= 0.0 || opening >= TAU {
            return Err(Error::InvalidWedge {
                alpha_minus,
                alpha_plus,
            });
        }
        Ok(WedgeSpec {
            alpha_minus,
            alpha_plus,
        })
    }

    /// The wedge `<0, alpha>`.
    pub fn with_opening(alpha: f64) -> Result<Self> {
        Self::new(0.0, alpha)
    }

    pub fn alpha_minus(&self) -> f64 {
        self.alpha_minus
    }

    pub fn alpha_plus(&self) -> f64 {
        self.alpha_plus
    }

    pub fn opening(&self) -> f64 {
        self.alpha_plus - self.alpha_minus
    }

    /// Angle of `theta` measured counterclockwise from the minus ray, in `[0, 2pi)`.
    pub fn relative_angle(&self, theta: f64) -> f64 {
        (theta - self.alpha_minus).rem_euclid(TAU)
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        let d = self.relative_angle(theta);
        d <= self.opening() + ANGLE_TOL || d >= TAU - ANGLE_TOL
    }

    pub fn contains(&self, p: PolarPoint) -> bool {
        p.r == 0.0 || self.contains_angle(p.theta)
    }

    /// Polar coordinates of a cartesian point, with the angle chosen in
    /// `[alpha_minus, alpha_plus]` whenever the point is in the closed wedge.
    pub fn polar_of(&self, x: [f64; 2]) -> PolarPoint {
        let p = PolarPoint::from_cartesian(x);
        let d = self.relative_angle(p.theta);
        let d = if d >= TAU - ANGLE_TOL { 0.0 } else { d };
        PolarPoint::new(p.r, self.alpha_minus + d)
    }

    /// `Some(m)` when the opening equals `pi/m` within [`PI_OVER_M_TOL`].
    pub fn pi_over_m(&self) -> Option<u32> {
        pi_over_m_index(self.opening())
    }

    pub fn as_pi_over_m(&self) -> Result<PiOverM> {
        match self.pi_over_m() {
            Some(m) => Ok(PiOverM::new(m, self.alpha_minus)),
            None => Err(Error::NotPiOverM {
                opening: self.opening(),
            }),
        }
    }
}

impl fmt::Display for WedgeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.alpha_minus, self.alpha_plus)
    }
}

/// `m` with `|opening - pi/m| <= PI_OVER_M_TOL`, if any.
pub fn pi_over_m_index(opening: f64) -> Option<u32> {
    if !(opening > 0.0) || !opening.is_finite() {
        return None;
    }
    let m = (PI / opening).round();
    if m < 1.0 || m > u32::MAX as f64 {
        return None;
    }
    if (opening - PI / m).abs() <= PI_OVER_M_TOL {
        Some(m as u32)
    } else {
        None
    }
}

/// Largest `pi/m` not exceeding `alpha`, returned as `m`.
///
/// A wedge whose opening already is `pi/m` (within tolerance) gets that `m`,
/// so round-off in `pi / alpha` never drops to the next smaller sub-wedge.
pub fn sub_wedge_index(alpha: f64) -> u32 {
    match pi_over_m_index(alpha) {
        Some(m) => m,
        None => (PI / alpha).ceil().max(1.0) as u32,
    }
}

/// A wedge of opening exactly `pi/m` whose minus ray sits at `base`.
///
/// Unlike [`WedgeSpec`] the base angle may be any real number; the recursive
/// samplers place sub-wedges that straddle the outer rays.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiOverM {
    pub m: u32,
    pub base: f64,
}

impl PiOverM {
    pub fn new(m: u32, base: f64) -> Self {
        assert!(m >= 1, "m must be at least 1");
        PiOverM { m, base }
    }

    pub fn opening(&self) -> f64 {
        PI / self.m as f64
    }

    pub fn plus(&self) -> f64 {
        self.base + self.opening()
    }

    /// Angle of the `k`-th image of `theta`: `k*alpha + theta` for even `k`,
    /// `(k+1)*alpha - theta + 2*base` for odd `k`, reduced modulo `2pi`.
    pub fn image_angle(&self, k: u32, theta: f64) -> f64 {
        let alpha = self.opening();
        let kf = k as f64;
        let a = if k % 2 == 0 {
            kf * alpha + theta
        } else {
            (kf + 1.0) * alpha - theta + 2.0 * self.base
        };
        a.rem_euclid(TAU)
    }

    /// Index `k` of the sector `D_k = [base + k*alpha, base + (k+1)*alpha]`
    /// containing the angle.
    pub fn sector_of(&self, theta: f64) -> u32 {
        let alpha = self.opening();
        let d = (theta - self.base).rem_euclid(TAU);
        let k = (d / alpha).floor() as u32;
        k.min(2 * self.m - 1)
    }

    /// Maps an angle lying in sector `k` back to the base sector.
    pub fn unfold_from_sector(&self, k: u32, theta: f64) -> f64 {
        let alpha = self.opening();
        let kf = k as f64;
        let rel = if k % 2 == 0 {
            theta - kf * alpha
        } else {
            (kf + 1.0) * alpha + 2.0 * self.base - theta
        };
        // bring to the base sector's range
        let d = (rel - self.base).rem_euclid(TAU);
        let d = if d > alpha { if d > 0.5 * (alpha + TAU) { 0.0 } else { alpha } } else { d };
        self.base + d
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        let d = (theta - self.base).rem_euclid(TAU);
        d <= self.opening() + ANGLE_TOL || d >= TAU - ANGLE_TOL
    }
}

/// `theta_k` for the `pi/m` wedge described by a [`WedgeSpec`].
pub fn image_angle(k: u32, theta: f64, wedge: &WedgeSpec) -> Result<f64> {
    let w = wedge.as_pi_over_m()?;
    if k >= 2 * w.m {
        return Err(Error::InvalidParameter(format!(
            "image index {k} outside 0..{}",
            2 * w.m
        )));
    }
    Ok(w.image_angle(k, theta))
}

/// Folds an angle of a sub-wedge that may straddle a ray of `<0, alpha>`
/// back into `[0, alpha]` by one mirror reflection.
pub fn fold_into_wedge(theta_tilde: f64, alpha: f64) -> f64 {
    if theta_tilde < 0.0 {
        -theta_tilde
    } else if theta_tilde > alpha {
        2.0 * alpha - theta_tilde
    } else {
        theta_tilde
    }
}

/// A point in polar coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Self {
        debug_assert!(r >= 0.0 && theta.is_finite());
        PolarPoint { r, theta }
    }

    /// Angle taken in `[0, 2pi)`.
    pub fn from_cartesian(x: [f64; 2]) -> Self {
        let r = x[0].hypot(x[1]);
        let theta = if r == 0.0 {
            0.0
        } else {
            x[1].atan2(x[0]).rem_euclid(TAU)
        };
        PolarPoint { r, theta }
    }

    pub fn cartesian(&self) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        [self.r * c, self.r * s]
    }
}

/// Row-major 2x2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn rotation(angle: f64) -> Mat2 {
        let (s, c) = angle.sin_cos();
        Mat2([[c, -s], [s, c]])
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        let scale = self.0.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        if !d.is_finite() || d.abs() <= 1e-14 * scale * scale {
            return None;
        }
        let m = &self.0;
        Some(Mat2([
            [m[1][1] / d, -m[0][1] / d],
            [-m[1][0] / d, m[0][0] / d],
        ]))
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        [
            m[0][0] * x[0] + m[0][1] * x[1],
            m[1][0] * x[0] + m[1][1] * x[1],
        ]
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &other.0;
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

/// The four cartesian descriptions of a wedge bounded by `y = 0` and `y = a x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionCase {
    /// `y >= 0 and y <= a x`, `a > 0`
    AndPos,
    /// `y >= 0 and y >= a x`, `a < 0`
    AndNeg,
    /// `y >= 0 or y >= a x`, `a > 0`
    OrPos,
    /// `y >= 0 or y <= a x`, `a < 0`
    OrNeg,
}

impl RegionCase {
    fn is_and(self) -> bool {
        matches!(self, RegionCase::AndPos | RegionCase::AndNeg)
    }

    /// Whether the slope inequality reads `y <= a x`.
    fn slope_le(self) -> bool {
        matches!(self, RegionCase::AndPos | RegionCase::OrNeg)
    }

    fn slope_positive(self) -> bool {
        matches!(self, RegionCase::AndPos | RegionCase::OrPos)
    }

    pub fn contains(self, slope: f64, x: [f64; 2]) -> bool {
        let tol = 1e-12 * (1.0 + x[0].abs().max(x[1].abs()));
        let upper = x[1] >= -tol;
        let line = if self.slope_le() {
            x[1] <= slope * x[0] + tol
        } else {
            x[1] >= slope * x[0] - tol
        };
        if self.is_and() {
            upper && line
        } else {
            upper || line
        }
    }
}

impl FromStr for RegionCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "and-pos" => Ok(RegionCase::AndPos),
            "and-neg" => Ok(RegionCase::AndNeg),
            "or-pos" => Ok(RegionCase::OrPos),
            "or-neg" => Ok(RegionCase::OrNeg),
            other => Err(Error::InvalidParameter(format!("unknown region case {other:?}"))),
        }
    }
}

/// A correlated planar Brownian motion with constant drift, started in a wedge
/// given by its cartesian description.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelatedSetup {
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
    pub slope: f64,
    pub region: RegionCase,
    pub start: [f64; 2],
    pub drift: [f64; 2],
}

impl CorrelatedSetup {
    pub fn validate(&self) -> Result<()> {
        ensure_finite(&[
            self.sigma1,
            self.sigma2,
            self.rho,
            self.slope,
            self.start[0],
            self.start[1],
            self.drift[0],
            self.drift[1],
        ])?;
        if self.sigma1 <= 0.0 || self.sigma2 <= 0.0 {
            return Err(Error::SingularMatrix);
        }
        if !(self.rho > -1.0 && self.rho < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "correlation {} outside (-1, 1)",
                self.rho
            )));
        }
        if self.slope == 0.0 || (self.slope > 0.0) != self.region.slope_positive() {
            return Err(Error::InvalidParameter(format!(
                "slope {} does not match region {:?}",
                self.slope, self.region
            )));
        }
        if !self.region.contains(self.slope, self.start) {
            return Err(Error::OutsideRegion);
        }
        Ok(())
    }

    /// Upper-triangular Cholesky-type factor with `Sigma = sigma sigma^T`.
    pub fn cholesky(&self) -> Mat2 {
        let s = (1.0 - self.rho * self.rho).sqrt();
        Mat2([
            [self.sigma1 * s, self.sigma1 * self.rho],
            [0.0, self.sigma2],
        ])
    }
}

/// A problem in standard coordinates, obtained from a [`CorrelatedSetup`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecorrelatedProblem {
    pub wedge: WedgeSpec,
    pub start: PolarPoint,
    pub drift: [f64; 2],
    /// Original to standard coordinates.
    pub forward_map: Mat2,
    /// Standard to original coordinates.
    pub inverse_map: Mat2,
    /// `sigma2 - a sigma1 rho == 0`: the slanted ray maps to the vertical axis
    /// and the problem splits into two independent one-dimensional motions
    /// when the region is a quadrant.
    pub degenerate: bool,
}

impl DecorrelatedProblem {
    pub fn to_original(&self, x: [f64; 2]) -> [f64; 2] {
        self.inverse_map.apply(x)
    }

    /// True when the problem is the quadrant product of two half-lines.
    pub fn is_quadrant_product(&self) -> bool {
        self.degenerate && (self.wedge.opening() - PI / 2.0).abs() < PI_OVER_M_TOL
    }
}

/// Slope of the image ray in standard coordinates.
pub fn decorrelated_slope(setup: &CorrelatedSetup) -> Option<f64> {
    let denom = setup.sigma2 - setup.slope * setup.sigma1 * setup.rho;
    if denom.abs() <= 1e-12 * setup.sigma2 {
        None
    } else {
        Some(setup.slope * setup.sigma1 * (1.0 - setup.rho * setup.rho).sqrt() / denom)
    }
}

pub fn decorrelate(setup: &CorrelatedSetup) -> Result<DecorrelatedProblem> {
    setup.validate()?;
    let sigma = setup.cholesky();
    let forward = sigma.inverse().ok_or(Error::SingularMatrix)?;
    let denom = setup.sigma2 - setup.slope * setup.sigma1 * setup.rho;

    let (alpha, degenerate) = match decorrelated_slope(setup) {
        None => {
            let a = if setup.region.is_and() {
                PI / 2.0
            } else {
                1.5 * PI
            };
            (a, true)
        }
        Some(a_prime) => {
            // a negative denominator flips the slope inequality
            let le = setup.region.slope_le() == (denom > 0.0);
            let alpha = match (setup.region.is_and(), le) {
                (true, true) => a_prime.atan(),
                (true, false) => PI + a_prime.atan(),
                (false, false) => PI + a_prime.atan(),
                (false, true) => TAU + a_prime.atan(),
            };
            (alpha, false)
        }
    };

    let wedge = WedgeSpec::with_opening(alpha)?;
    let x = forward.apply(setup.start);
    let start = wedge.polar_of(x);
    if !wedge.contains(start) {
        return Err(Error::OutsideRegion);
    }
    Ok(DecorrelatedProblem {
        wedge,
        start,
        drift: forward.apply(setup.drift),
        forward_map: forward,
        inverse_map: sigma,
        degenerate,
    })
}

/// Image of the wedge `<0, alpha>` under an invertible linear map, brought back
/// to standard position `<0, alpha'>`.
///
/// Returns the new wedge and the orthogonal-corrected map `Q A`, where `Q` is a
/// rotation (composed with a mirror when `det A < 0`) sending the image of the
/// minus ray to angle 0. Brownian motion is invariant under `Q`, so `Q A` is as
/// good a decorrelating map as `A`.
pub fn map_wedge(a: &Mat2, alpha: f64) -> Result<(WedgeSpec, Mat2)> {
    if a.inverse().is_none() {
        return Err(Error::SingularMatrix);
    }
    let a = if a.det() < 0.0 {
        Mat2([[1.0, 0.0], [0.0, -1.0]]).mul(a)
    } else {
        *a
    };
    let e0 = a.apply([1.0, 0.0]);
    let (s, c) = alpha.sin_cos();
    let e1 = a.apply([c, s]);
    let phi0 = e0[1].atan2(e0[0]);
    let phi1 = e1[1].atan2(e1[0]);
    let mut opening = (phi1 - phi0).rem_euclid(TAU);
    if opening == 0.0 {
        opening = TAU;
    }
    let wedge = WedgeSpec::with_opening(opening)?;
    Ok((wedge, Mat2::rotation(-phi0).mul(&a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn wedge_invariants_are_enforced() {
        assert!(WedgeSpec::new(0.0, 1.0).is_ok());
        assert!(WedgeSpec::new(1.0, 1.0).is_err());
        assert!(WedgeSpec::new(-0.1, 1.0).is_err());
        assert!(WedgeSpec::new(0.0, TAU).is_err());
        assert!(WedgeSpec::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn pi_over_m_detection() {
        assert_eq!(WedgeSpec::with_opening(PI / 3.0).unwrap().pi_over_m(), Some(3));
        assert_eq!(WedgeSpec::with_opening(PI / 3.0 + 5e-10).unwrap().pi_over_m(), Some(3));
        assert_eq!(WedgeSpec::with_opening(PI / 3.0 + 1e-6).unwrap().pi_over_m(), None);
        assert_eq!(WedgeSpec::with_opening(0.9).unwrap().pi_over_m(), None);
        assert_eq!(sub_wedge_index(0.9), 4);
        assert_eq!(sub_wedge_index(PI / 3.0), 3);
        assert_eq!(sub_wedge_index(0.58), 6);
        assert_eq!(sub_wedge_index(1.5 * PI), 1);
    }

    #[test]
    fn image_angle_examples() {
        let w = WedgeSpec::with_opening(PI / 3.0).unwrap();
        assert!(close(image_angle(0, 0.2, &w).unwrap(), 0.2, 1e-15));
        assert!(close(image_angle(1, 0.2, &w).unwrap(), 2.0 * PI / 3.0 - 0.2, 1e-15));
        assert!(close(image_angle(2, 0.2, &w).unwrap(), 2.0 * PI / 3.0 + 0.2, 1e-15));
        assert!(image_angle(6, 0.2, &w).is_err());
        assert!(image_angle(0, 0.2, &WedgeSpec::with_opening(0.9).unwrap()).is_err());
    }

    #[test]
    fn images_tile_the_circle() {
        let w = PiOverM::new(5, 0.4);
        let theta = 0.4 + 0.23;
        let mut angles: Vec<f64> = (0..10).map(|k| w.image_angle(k, theta)).collect();
        for (k, a) in angles.iter().enumerate() {
            assert_eq!(w.sector_of(*a), k as u32);
            assert!(close(w.unfold_from_sector(k as u32, *a), theta, 1e-12));
        }
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for pair in angles.windows(2) {
            assert!(pair[1] - pair[0] > 1e-6);
        }
    }

    #[test]
    fn fold_examples() {
        assert_eq!(fold_into_wedge(0.5, 1.0), 0.5);
        assert!(close(fold_into_wedge(-0.1, 1.0), 0.1, 1e-15));
        assert!(close(fold_into_wedge(1.1, 1.0), 0.9, 1e-15));
    }

    fn setup(sigma1: f64, sigma2: f64, rho: f64, slope: f64, region: RegionCase, x0: [f64; 2]) -> CorrelatedSetup {
        CorrelatedSetup {
            sigma1,
            sigma2,
            rho,
            slope,
            region,
            start: x0,
            drift: [0.0, 0.0],
        }
    }

    #[test]
    fn decorrelate_identity_case() {
        let p = decorrelate(&setup(1.0, 1.0, 0.0, 1.0, RegionCase::AndPos, [1.0, 0.5])).unwrap();
        assert!(close(p.wedge.opening(), PI / 4.0, 1e-15));
        assert_eq!(p.forward_map, Mat2::IDENTITY);
        let x = p.start.cartesian();
        assert!(close(x[0], 1.0, 1e-15) && close(x[1], 0.5, 1e-15));
        assert!(!p.degenerate);
    }

    #[test]
    fn decorrelate_correlated_case() {
        let s = setup(1.0, 1.0, 0.5, 1.0, RegionCase::AndPos, [1.0, 0.5]);
        assert!(close(decorrelated_slope(&s).unwrap(), 3f64.sqrt(), 1e-14));
        let p = decorrelate(&s).unwrap();
        assert!(close(p.wedge.opening(), PI / 3.0, 1e-14));
    }

    #[test]
    fn decorrelate_degenerate_case() {
        let p = decorrelate(&setup(1.0, 1.0, 0.5, 2.0, RegionCase::AndPos, [1.0, 0.5])).unwrap();
        assert!(p.degenerate);
        assert!(p.is_quadrant_product());
        let q = decorrelate(&setup(1.0, 1.0, 0.5, 2.0, RegionCase::OrPos, [1.0, 0.5])).unwrap();
        assert!(q.degenerate && close(q.wedge.opening(), 1.5 * PI, 1e-15));
    }

    #[test]
    fn decorrelate_rejects_bad_input() {
        assert!(matches!(
            decorrelate(&setup(1.0, 1.0, 0.0, 1.0, RegionCase::AndPos, [1.0, -0.5])),
            Err(Error::OutsideRegion)
        ));
        assert!(decorrelate(&setup(0.0, 1.0, 0.0, 1.0, RegionCase::AndPos, [1.0, 0.5])).is_err());
        assert!(decorrelate(&setup(1.0, 1.0, 0.0, -1.0, RegionCase::AndPos, [1.0, 0.5])).is_err());
        assert!(decorrelate(&setup(1.0, 1.0, 1.0, 1.0, RegionCase::AndPos, [1.0, 0.5])).is_err());
    }

    #[test]
    fn table_agrees_with_general_linear_map() {
        let cases = [
            (RegionCase::AndPos, 1.3, [1.0, 0.2]),
            (RegionCase::AndNeg, -0.7, [-1.0, 0.4]),
            (RegionCase::OrPos, 0.8, [-1.0, 0.1]),
            (RegionCase::OrNeg, -2.5, [1.0, -3.0]),
        ];
        for rho in [-0.6, 0.0, 0.3, 0.8] {
            for (region, slope, x0) in cases {
                let s = setup(1.3, 0.7, rho, slope, region, x0);
                let Ok(p) = decorrelate(&s) else { continue };
                if p.degenerate {
                    continue;
                }
                // the table wedge is the image of the original region under sigma^{-1}
                let original = WedgeSpec::with_opening(match region {
                    RegionCase::AndPos => slope.atan(),
                    RegionCase::AndNeg | RegionCase::OrPos => PI + slope.atan(),
                    RegionCase::OrNeg => TAU + slope.atan(),
                })
                .unwrap();
                let (w, _) = map_wedge(&p.forward_map, original.opening()).unwrap();
                assert!(
                    close(w.opening(), p.wedge.opening(), 1e-12),
                    "{region:?} rho={rho}: {} vs {}",
                    w.opening(),
                    p.wedge.opening()
                );
            }
        }
    }

    #[test]
    fn covariance_of_mapped_samples_is_identity() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let s = setup(1.0, 1.0, 0.5, 1.0, RegionCase::AndPos, [1.0, 0.5]);
        let p = decorrelate(&s).unwrap();
        let sigma = s.cholesky();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mut acc = [0.0; 3];
        for _ in 0..n {
            let g: [f64; 2] = [StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)];
            let w = sigma.apply(g);
            let back = p.forward_map.apply(w);
            acc[0] += back[0] * back[0];
            acc[1] += back[1] * back[1];
            acc[2] += back[0] * back[1];
        }
        let n = n as f64;
        assert!(close(acc[0] / n, 1.0, 0.02));
        assert!(close(acc[1] / n, 1.0, 0.02));
        assert!(close(acc[2] / n, 0.0, 0.02));
        // the ray y = x maps onto the ray at pi/3
        let ray = p.forward_map.apply([1.0, 1.0]);
        assert!(close(ray[1].atan2(ray[0]), PI / 3.0, 1e-14));
    }

    #[test]
    fn polar_of_snaps_tiny_negative_angles() {
        let w = WedgeSpec::with_opening(1.0).unwrap();
        let p = w.polar_of([1.0, -1e-17]);
        assert!(p.theta.abs() < 1e-15);
    }
}
