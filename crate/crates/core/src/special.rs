//! Modified Bessel functions of the first kind, `I_nu(x)` for real `nu >= 0`
//! and `x >= 0`, and the truncation rule for the Bessel series of the wedge
//! densities.
//!
//! For `x <= 700` the power series
//!
//! ```text
//! I_nu(x) = sum_k (x/2)^(nu+2k) / (k! Gamma(k+nu+1))
//! ```
//!
//! is summed in log-scaled form: all terms are positive, so there is no
//! cancellation, only overflow to manage. Beyond that the uniform (Debye)
//! expansion is used for `nu >= 1` and the Hankel expansion below.

use std::f64::consts::PI;

use crate::error::{ensure_finite, Error, Result};

/// Argument above which the asymptotic expansions replace the power series.
pub const ASYMPTOTIC_THRESHOLD: f64 = 700.0;

/// Truncation control for the power series and the density series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesTolerance {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        SeriesTolerance {
            rel_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

impl SeriesTolerance {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) || max_terms < 1 {
            return Err(Error::InvalidParameter(format!(
                "series tolerance ({rel_tol}, {max_terms})"
            )));
        }
        Ok(SeriesTolerance { rel_tol, max_terms })
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln I_nu(x)`; `-inf` when `x = 0 < nu`.
pub fn log_bessel_i(nu: f64, x: f64, tol: SeriesTolerance) -> Result<f64> {
    ensure_finite(&[nu, x])?;
    if nu < 0.0 || x < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "bessel_i needs nu >= 0 and x >= 0, got ({nu}, {x})"
        )));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    if x > ASYMPTOTIC_THRESHOLD {
        return Ok(if nu >= 1.0 {
            log_debye(nu, x)
        } else {
            log_hankel(nu, x)
        });
    }
    log_power_series(nu, x, tol)
}

pub fn bessel_i(nu: f64, x: f64, tol: SeriesTolerance) -> Result<f64> {
    log_bessel_i(nu, x, tol).map(f64::exp)
}

/// `exp(-x) I_nu(x)`, finite for every argument.
pub fn bessel_i_scaled(nu: f64, x: f64, tol: SeriesTolerance) -> Result<f64> {
    log_bessel_i(nu, x, tol).map(|l| (l - x).exp())
}

const RESCALE: f64 = 1e250;

fn log_power_series(nu: f64, x: f64, tol: SeriesTolerance) -> Result<f64> {
    let (log_scale, sum) = power_series_parts(nu, x, tol)?;
    Ok(log_scale + sum.ln())
}

/// `(ln s, sum)` with `I_nu(x) = s * sum` from the power series, `x > 0`.
/// Keeping `sum` in linear form lets callers scale many orders by a common
/// factor without rounding each through a large logarithm.
pub(crate) fn power_series_parts(nu: f64, x: f64, tol: SeriesTolerance) -> Result<(f64, f64)> {
    let half = 0.5 * x;
    let log_first = nu * half.ln() - ln_gamma(nu + 1.0);
    let q = half * half;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut log_shift = 0.0f64;
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        let ratio = q / ((kf + 1.0) * (kf + 1.0 + nu));
        term *= ratio;
        sum += term;
        k += 1;
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            log_shift += RESCALE.ln();
        }
        if ratio < 1.0 {
            // ratios decrease from here on, so the tail is geometric-bounded
            let next = q / ((kf + 2.0) * (kf + 2.0 + nu));
            let tail = term * next / (1.0 - next);
            if tail <= 0.1 * tol.rel_tol * sum {
                break;
            }
        }
        if k >= tol.max_terms {
            return Err(Error::SeriesCapExceeded {
                max_terms: tol.max_terms,
            });
        }
    }
    Ok((log_first + log_shift, sum))
}

/// Uniform expansion of `I_nu(nu z)` for large `nu^2 + x^2`.
fn log_debye(nu: f64, x: f64) -> f64 {
    let z = x / nu;
    let s = (1.0 + z * z).sqrt();
    let p = 1.0 / s;
    let eta = s + (z / (1.0 + s)).ln();
    let p2 = p * p;
    let u1 = p * (3.0 - 5.0 * p2) / 24.0;
    let u2 = p2 * (81.0 - 462.0 * p2 + 385.0 * p2 * p2) / 1152.0;
    let u3 = p * p2 * (30375.0 - 369603.0 * p2 + 765765.0 * p2 * p2 - 425425.0 * p2 * p2 * p2)
        / 414720.0;
    let u4 = p2
        * p2
        * (4465125.0 - 94121676.0 * p2 + 349922430.0 * p2 * p2 - 446185740.0 * p2 * p2 * p2
            + 185910725.0 * p2 * p2 * p2 * p2)
        / 39813120.0;
    let series = 1.0 + u1 / nu + u2 / (nu * nu) + u3 / (nu * nu * nu) + u4 / (nu * nu * nu * nu);
    nu * eta - 0.5 * (2.0 * PI * nu).ln() + 0.5 * p.ln() + series.ln()
}

/// Large-argument expansion `e^x / sqrt(2 pi x) * sum (-1)^k a_k(nu) / x^k`.
fn log_hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=12 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 {
            break;
        }
    }
    x - 0.5 * (2.0 * PI * x).ln() + sum.ln()
}

/// Upper bound on `ln I_nu(x)` from the power series:
/// `I_nu(x) <= (x/2)^nu / Gamma(nu+1) * exp(x^2 / (4 (nu+1)))`.
pub fn log_bessel_upper_bound(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    nu * (0.5 * x).ln() - ln_gamma(nu + 1.0) + x * x / (4.0 * (nu + 1.0))
}

/// First index `N` of the Bessel series `sum_n I_{n nu_step}(x) c_n`, `|c_n| <= 1`,
/// whose tail from `N` on is below `rel_tol * I_0(x) / 2` (the `n = 0`
/// coefficient of the density series). Terms `1..N` must be summed.
///
/// The tail is bounded by the power-series majorant of `I_nu`, which is
/// log-concave in `nu` once `nu >= x / sqrt(2)`, so a geometric bound on the
/// remaining terms applies from there. For orders large against `x` the
/// majorant behaves like the classical `(e x / 2 nu)^nu / sqrt(2 pi nu)`.
pub fn series_tail_cutoff(nu_step: f64, x: f64, tol: SeriesTolerance) -> usize {
    assert!(nu_step > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1;
    }
    let log_i0 = log_bessel_i(0.0, x, tol).unwrap_or(x);
    let threshold = tol.rel_tol.ln() + log_i0 - 2f64.ln();
    let first = ((x / 2f64.sqrt()) / nu_step).ceil().max(1.0) as usize;
    let mut n = first;
    loop {
        let nu = n as f64 * nu_step;
        let b = log_bessel_upper_bound(nu, x);
        let b_next = log_bessel_upper_bound(nu + nu_step, x);
        let q = (b_next - b).exp();
        if q < 1.0 && b - (1.0 - q).ln() <= threshold {
            return n;
        }
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> SeriesTolerance {
        SeriesTolerance::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_i(0.0, 0.0, tol()).unwrap(), 1.0);
        assert_eq!(bessel_i(1.5, 0.0, tol()).unwrap(), 0.0);
    }

    #[test]
    fn reference_values() {
        // 40-digit direct summation of the power series
        let cases = [
            (1.0, 1.0, 0.565_159_103_992_485_027_21),
            (0.0, 2.0, 2.279_585_302_336_067_267_4),
            (2.5, 10.0, 2_028.512_757_391_935_669_1),
            (10.0, 5.0, 0.004_580_044_419_176_051_261_2),
            (0.5, 0.3, 0.443_604_224_918_820_056_15),
            (7.25, 40.0, 7_671_082_712_415_411.839_6),
        ];
        for (nu, x, want) in cases {
            let got = bessel_i(nu, x, tol()).unwrap();
            assert!(rel(got, want) < 1e-12, "I_{nu}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn asymptotic_reference_values() {
        let cases = [
            (0.0, 750.0, 745.771_191_641_462_569_835_2),
            (3.3, 800.0, 795.732_101_450_753_930_178_7),
            (50.0, 900.0, 894.290_699_713_297_072_806_2),
            (400.0, 1000.0, 916.609_001_738_260_598_064_3),
            (0.5, 2000.0, 1_995.280_610_237_024_286_077),
        ];
        for (nu, x, want) in cases {
            let got = log_bessel_i(nu, x, tol()).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "ln I_{nu}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn series_and_asymptotics_agree_past_threshold() {
        let wide = SeriesTolerance::new(1e-14, 100_000).unwrap();
        for nu in [0.0, 0.5, 1.0, 3.0, 12.5, 60.0, 300.0] {
            for x in [720.0, 900.0] {
                let series = log_power_series(nu, x, wide).unwrap();
                let asym = log_bessel_i(nu, x, tol()).unwrap();
                assert!((series - asym).abs() < 1e-11 * series.abs(), "nu={nu} x={x}: {series} vs {asym}");
            }
        }
    }

    #[test]
    fn exponential_upper_bounds() {
        assert!(bessel_i(0.0, 2.0, tol()).unwrap() <= 2f64.exp());
        assert!(bessel_i(2.0, 3.0, tol()).unwrap() <= 3f64.exp() + 1.0 / (PI * 5.0));
    }

    #[test]
    fn recurrence_bounds_and_monotonicity_on_grid() {
        let xs: Vec<f64> = (1..=200).map(|i| 0.1 * i as f64).collect();
        for nu in 1..=10 {
            let nu = nu as f64;
            let mut prev = 0.0;
            for &x in &xs {
                let lo = bessel_i(nu - 1.0, x, tol()).unwrap();
                let mid = bessel_i(nu, x, tol()).unwrap();
                let hi = bessel_i(nu + 1.0, x, tol()).unwrap();
                let resid = (lo - hi - 2.0 * nu / x * mid).abs();
                assert!(resid <= 1e-9 * lo.abs().max(mid), "nu={nu} x={x}");
                assert!(mid <= x.exp() + 1.0 / (PI * (nu + x)));
                assert!(bessel_i(0.0, x, tol()).unwrap() <= x.exp());
                assert!(mid > prev);
                prev = mid;
            }
        }
    }

    #[test]
    fn differential_equation_residual() {
        for nu in [2.0, 2.7, 5.0, 9.3] {
            for x in [0.4, 1.0, 3.5, 12.0, 30.0] {
                let i = |n: f64| bessel_i(n, x, tol()).unwrap();
                let d1 = 0.5 * (i(nu - 1.0) + i(nu + 1.0));
                let d2 = 0.25 * (i(nu - 2.0) + 2.0 * i(nu) + i(nu + 2.0));
                let resid = x * x * d2 + x * d1 - (x * x + nu * nu) * i(nu);
                assert!(resid.abs() <= 1e-10 * (x * x + nu * nu) * i(nu), "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn cap_is_reported() {
        let tight = SeriesTolerance::new(1e-12, 5).unwrap();
        assert!(matches!(
            bessel_i(0.0, 50.0, tight),
            Err(Error::SeriesCapExceeded { max_terms: 5 })
        ));
        assert!(bessel_i(-1.0, 1.0, tol()).is_err());
        assert!(bessel_i(1.0, f64::INFINITY, tol()).is_err());
    }

    #[test]
    fn cutoff_examples() {
        assert_eq!(series_tail_cutoff(3.0, 0.0, tol()), 1);
        let n = series_tail_cutoff(3.0, 1.0, tol());
        assert!(n <= 5, "cutoff {n}");
        // the classical asymptotic bound at N = 5 is already far below 1e-12
        let nu = 15.0;
        assert!((1.0f64.exp() / (2.0 * nu)).powf(nu) < 1e-12);
        // the neglected tail really is below tolerance
        let i0 = bessel_i(0.0, 1.0, tol()).unwrap();
        let tail: f64 = (n..n + 50)
            .map(|k| bessel_i(3.0 * k as f64, 1.0, tol()).unwrap())
            .sum();
        assert!(tail <= 1e-12 * 0.5 * i0);
    }

    #[test]
    fn cutoff_nonincreasing_in_step() {
        for x in [0.3, 2.0, 15.0, 80.0] {
            let mut prev = usize::MAX;
            for step in [0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 10.0] {
                let n = series_tail_cutoff(step, x, tol());
                assert!(n <= prev, "x={x} step={step}: {n} > {prev}");
                prev = n;
            }
        }
    }

    #[test]
    fn cutoff_tail_is_below_tolerance() {
        for x in [0.5, 5.0, 40.0] {
            for step in [1.0, 2.5, 4.0] {
                let n = series_tail_cutoff(step, x, tol());
                let i0 = bessel_i(0.0, x, tol()).unwrap();
                let tail: f64 = (n..n + 400)
                    .map(|k| bessel_i(step * k as f64, x, tol()).unwrap())
                    .sum();
                assert!(tail <= 1e-12 * 0.5 * i0, "x={x} step={step}");
            }
        }
    }
}
