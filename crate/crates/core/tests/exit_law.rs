use std::f64::consts::PI;

use wedgesim::density::{exit_radius_cdf, normal_cdf, survival_probability, ExitLawParams, Side};
use wedgesim::geometry::{PiOverM, PolarPoint};
use wedgesim::rng::RngStream;
use wedgesim::sampler::{exit_radius_from_uniform, sample_exit_radius, sample_exit_side, sample_exit_time};
use wedgesim::stats::ks_statistic;

struct Draw {
    side: Side,
    r: f64,
    t: f64,
}

fn draws(w: PiOverM, x: PolarPoint, n: usize, seed: u64) -> Vec<Draw> {
    let mut rng = RngStream::new(seed);
    let rel = x.theta - w.base;
    (0..n)
        .map(|_| {
            let side = sample_exit_side(rel, w.opening(), &mut rng).unwrap();
            let r = sample_exit_radius(x.r, rel, w.opening(), side, &mut rng);
            let t = sample_exit_time(&ExitLawParams::new(w, x, side), r, &mut rng).unwrap();
            Draw { side, r, t }
        })
        .collect()
}

fn three_sigma(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn half_plane_exit_point_is_cauchy() {
    let d = draws(PiOverM::new(1, 0.0), PolarPoint::new(1.0, 0.5 * PI), 10_000, 1);
    let abscissa: Vec<f64> = d.iter().map(|d| if d.side == Side::Minus { d.r } else { -d.r }).collect();
    let ks = ks_statistic(&abscissa, |x| 0.5 + x.atan() / PI);
    assert!(ks < 0.02, "ks {ks}");
}

#[test]
fn half_plane_exit_time_is_one_dimensional_hitting_time() {
    let n = 100_000;
    let d = draws(PiOverM::new(1, 0.0), PolarPoint::new(1.0, 0.5 * PI), n, 2);
    let p = d.iter().filter(|d| d.t <= 1.0).count() as f64 / n as f64;
    let want = 2.0 * (1.0 - normal_cdf(1.0));
    assert!((p - want).abs() < three_sigma(want, n), "{p} vs {want}");
}

#[test]
fn side_probability_is_angular_fraction() {
    let n = 100_000;
    for (m, frac) in [(1, 0.3), (3, 0.7), (6, 0.5)] {
        let w = PiOverM::new(m, 0.2);
        let x = PolarPoint::new(1.3, w.base + frac * w.opening());
        let d = draws(w, x, n, 3);
        let p = d.iter().filter(|d| d.side == Side::Plus).count() as f64 / n as f64;
        assert!((p - frac).abs() < three_sigma(frac, n), "m={m}: {p} vs {frac}");
    }
}

#[test]
fn exit_radius_matches_integrated_density() {
    let w = PiOverM::new(3, 0.0);
    let x = PolarPoint::new(1.0, 0.4 * w.opening());
    let d = draws(w, x, 20_000, 4);
    for side in [Side::Minus, Side::Plus] {
        let params = ExitLawParams::new(w, x, side);
        let r: Vec<f64> = d.iter().filter(|d| d.side == side).map(|d| d.r).collect();
        let ks = ks_statistic(&r, |v| exit_radius_cdf(&params, v).unwrap());
        assert!(ks < 1.63 / (r.len() as f64).sqrt(), "{side:?}: ks {ks}");
    }
}

#[test]
fn exit_radius_inverse_is_monotone() {
    for side in [Side::Minus, Side::Plus] {
        let mut last = 0.0;
        for i in 1..1000 {
            let r = exit_radius_from_uniform(1.0, 0.3, 0.9, side, i as f64 / 1000.0);
            assert!(r > last);
            last = r;
        }
    }
}

#[test]
fn exit_time_matches_survival() {
    let n = 50_000;
    let w = PiOverM::new(3, 0.0);
    let x = PolarPoint::new(1.0, 0.4 * w.opening());
    let d = draws(w, x, n, 5);
    for t in [0.1, 0.3, 1.0, 3.0] {
        let want = 1.0 - survival_probability(&w, x, t).unwrap();
        let p = d.iter().filter(|d| d.t <= t).count() as f64 / n as f64;
        assert!((p - want).abs() < three_sigma(want, n).max(1e-3), "t={t}: {p} vs {want}");
    }
}
