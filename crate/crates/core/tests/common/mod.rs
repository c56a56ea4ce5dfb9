#![allow(dead_code)]

use std::f64::consts::PI;

use wedgesim::special::ln_gamma;

/// `P(tau > t)` in `<0, alpha>` from `(r0, theta0)` by its Bessel series.
pub fn survival_oracle(r0: f64, theta0: f64, alpha: f64, t: f64) -> f64 {
    let z = r0 * r0 / (4.0 * t);
    let mut s = 0.0;
    for n in 0..400 {
        let k = (2 * n + 1) as f64;
        let nu = k * PI / alpha;
        let term = (k * PI * theta0 / alpha).sin() / k
            * (bessel_i_series(0.5 * (nu - 1.0), z) + bessel_i_series(0.5 * (nu + 1.0), z));
        s += term;
        if term.abs() < 1e-18 * s.abs() {
            break;
        }
    }
    2.0 * r0 / (2.0 * PI * t).sqrt() * (-z).exp() * s
}

/// Mean and standard error.
pub fn mean_se(v: &[f64]) -> (f64, f64) {
    wedgesim::stats::mean_se(v)
}

/// `I_mu(z)` by its power series, for any order `mu > -1`.
pub fn bessel_i_series(mu: f64, z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = (mu * (0.5 * z).ln() - ln_gamma(mu + 1.0)).exp();
    let mut sum = term;
    for k in 1..10_000 {
        let kf = k as f64;
        term *= q / (kf * (kf + mu));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}
