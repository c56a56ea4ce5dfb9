//! Monte Carlo harness: path-indexed random streams, a fixed-order reduction
//! and fold-count diagnostics.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;

use crate::density::Side;
use crate::drift::{euler_reflected, euler_stopped, reflected_with_drift, stopped_with_drift, LinearField, TimeGrid};
use crate::error::{Error, Result};
use crate::geometry::{DecorrelatedProblem, Mat2, PolarPoint};
use crate::rng::RngStream;
use crate::sampler::{quadrant_reflected, quadrant_stopped, PathSample, ReflectedOptions, DEFAULT_FOLD_CAP};
use crate::stats::{effective_sample_size, half_width_95, mean_se};

/// Paths may fault (hit the iteration cap) up to this fraction.
pub const MAX_FAULT_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Stopped,
    Reflected,
    EulerStopped,
    EulerReflected,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Stopped => "stopped",
            Mode::Reflected => "reflected",
            Mode::EulerStopped => "euler-stopped",
            Mode::EulerReflected => "euler-reflected",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestFunction {
    /// `x^2 + y^2`.
    RadiusSq,
    /// `sin^2 theta`.
    SinSqTheta,
    /// First coordinate.
    Coord1,
    /// `1` if the path did not stop before the horizon.
    IndicatorSurvival,
    Constant1,
    /// `T ^ tau`.
    Elapsed,
}

impl TestFunction {
    pub fn name(self) -> &'static str {
        match self {
            TestFunction::RadiusSq => "radius-sq",
            TestFunction::SinSqTheta => "sin-sq-theta",
            TestFunction::Coord1 => "coord1",
            TestFunction::IndicatorSurvival => "survival",
            TestFunction::Constant1 => "one",
            TestFunction::Elapsed => "elapsed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            TestFunction::RadiusSq,
            TestFunction::SinSqTheta,
            TestFunction::Coord1,
            TestFunction::IndicatorSurvival,
            TestFunction::Constant1,
            TestFunction::Elapsed,
        ]
        .into_iter()
        .find(|f| f.name() == s)
    }

    /// Value on a sample whose endpoint `x` is in output coordinates.
    pub fn eval(self, x: [f64; 2], s: &PathSample) -> f64 {
        match self {
            TestFunction::RadiusSq => x[0] * x[0] + x[1] * x[1],
            TestFunction::SinSqTheta => {
                let r2 = x[0] * x[0] + x[1] * x[1];
                if r2 == 0.0 {
                    0.0
                } else {
                    x[1] * x[1] / r2
                }
            }
            TestFunction::Coord1 => x[0],
            TestFunction::IndicatorSurvival => {
                if s.hit_boundary() {
                    0.0
                } else {
                    1.0
                }
            }
            TestFunction::Constant1 => 1.0,
            TestFunction::Elapsed => s.elapsed,
        }
    }
}

/// Itô coefficients for the Euler modes.
#[derive(Clone, Debug, PartialEq)]
pub struct ItoSpec {
    pub field: LinearField,
    pub steps: usize,
}

/// One Monte Carlo experiment in standard coordinates `<0, alpha>`.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorConfig {
    pub alpha: f64,
    pub start: PolarPoint,
    pub drift: [f64; 2],
    pub mode: Mode,
    pub test_function: TestFunction,
    /// May be infinite for the stopped mode.
    pub horizon: f64,
    pub epsilon: f64,
    pub fold_cap: u64,
    pub n_samples: u64,
    pub seed: u64,
    /// Maps endpoints to the coordinates in which the test function is read.
    pub output_map: Mat2,
    /// Use the product of two half-lines (quadrant with a degenerate map).
    pub quadrant_product: bool,
    pub ito: Option<ItoSpec>,
}

impl EstimatorConfig {
    pub fn new(alpha: f64, start: PolarPoint, mode: Mode, test_function: TestFunction) -> Self {
        EstimatorConfig {
            alpha,
            start,
            drift: [0.0, 0.0],
            mode,
            test_function,
            horizon: 1.0,
            epsilon: crate::corner::DEFAULT_EPSILON,
            fold_cap: DEFAULT_FOLD_CAP,
            n_samples: 10_000,
            seed: 0,
            output_map: Mat2::IDENTITY,
            quadrant_product: false,
            ito: None,
        }
    }

    /// Configuration for a decorrelated problem; test functions read the
    /// endpoint in the original coordinates.
    pub fn from_problem(p: &DecorrelatedProblem, mode: Mode, f: TestFunction) -> Self {
        let mut c = Self::new(p.wedge.opening(), p.start, mode, f);
        c.drift = p.drift;
        c.output_map = p.inverse_map;
        c.quadrant_product = p.is_quadrant_product();
        c
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1 {
            return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
        }
        if !(self.horizon > 0.0) || (self.horizon.is_infinite() && self.mode != Mode::Stopped) {
            return Err(Error::InvalidParameter(format!("bad horizon {}", self.horizon)));
        }
        if matches!(self.mode, Mode::EulerStopped | Mode::EulerReflected) && self.ito.is_none() {
            return Err(Error::InvalidParameter("Euler modes need coefficients".into()));
        }
        Ok(())
    }

    fn reflected_options(&self) -> ReflectedOptions {
        ReflectedOptions {
            epsilon: self.epsilon,
            fold_cap: self.fold_cap,
        }
    }
}

/// Simulates path `index` of the experiment.
pub fn simulate_path(config: &EstimatorConfig, index: u64) -> Result<PathSample> {
    let mut rng = RngStream::substream(config.seed, index);
    let c = config;
    match c.mode {
        Mode::Stopped if c.quadrant_product => {
            let mut s = quadrant_stopped(c.start.cartesian(), c.horizon, &mut rng)?;
            s.log_weight = quadrant_log_weight(c, &s, s.elapsed);
            Ok(s)
        }
        Mode::Reflected if c.quadrant_product => {
            let mut s = quadrant_reflected(c.start.cartesian(), c.horizon, &mut rng)?;
            s.log_weight = quadrant_log_weight(c, &s, c.horizon);
            Ok(s)
        }
        Mode::Stopped => stopped_with_drift(c.start, c.drift, c.horizon, c.alpha, c.fold_cap, &mut rng),
        Mode::Reflected => {
            reflected_with_drift(c.start, c.drift, c.horizon, c.alpha, c.reflected_options(), &mut rng)
        }
        Mode::EulerStopped | Mode::EulerReflected => {
            let ito = c.ito.as_ref().ok_or_else(|| Error::InvalidParameter("missing coefficients".into()))?;
            let grid = TimeGrid::uniform(c.horizon, ito.steps)?;
            let x0 = c.start.cartesian();
            if c.mode == Mode::EulerStopped {
                euler_stopped(&ito.field, x0, &grid, c.alpha, c.fold_cap, &mut rng)
            } else {
                euler_reflected(&ito.field, x0, &grid, c.alpha, c.reflected_options(), &mut rng)
            }
        }
    }
}

fn quadrant_log_weight(c: &EstimatorConfig, s: &PathSample, elapsed: f64) -> f64 {
    let w = s.driving_endpoint.unwrap_or_else(|| s.cartesian());
    let x0 = c.start.cartesian();
    crate::drift::girsanov_log_weight(c.drift, [w[0] - x0[0], w[1] - x0[1]], elapsed)
}

/// Outcome of one path: `Ok` sample or a capped partial sample.
pub type PathOutcome = std::result::Result<PathSample, PathSample>;

/// All paths of the experiment in index order. Capped paths come back as
/// `Err(partial)`; any other error aborts the run.
pub fn simulate_all(config: &EstimatorConfig) -> Result<Vec<PathOutcome>> {
    config.validate()?;
    let outcomes: Vec<Result<PathOutcome>> = (0..config.n_samples)
        .into_par_iter()
        .map(|i| match simulate_path(config, i) {
            Ok(s) => Ok(Ok(s)),
            Err(Error::IterationCap { partial, .. }) => Ok(Err(*partial)),
            Err(e) => Err(e),
        })
        .collect();
    outcomes.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct McReport {
    pub estimate: f64,
    pub half_width_95: f64,
    pub standard_error: f64,
    pub n_samples: u64,
    pub n_faults: u64,
    pub mean_folds: f64,
    pub mean_weight: f64,
    pub effective_sample_size: f64,
    pub wall_time_seconds: f64,
    pub seed: u64,
}

/// Weighted Monte Carlo estimate of `E[f]`.
///
/// Faulted paths are excluded from the estimate and counted; more than 10%
/// of faults aborts the run.
pub fn estimate(config: &EstimatorConfig) -> Result<McReport> {
    let clock = Instant::now();
    let outcomes = simulate_all(config)?;
    let mut values = Vec::with_capacity(outcomes.len());
    let mut weights = Vec::with_capacity(outcomes.len());
    let mut folds = 0u64;
    let mut faults = 0u64;
    for o in &outcomes {
        match o {
            Ok(s) => {
                let w = s.weight();
                let x = config.output_map.apply(s.cartesian());
                values.push(w * config.test_function.eval(x, s));
                weights.push(w);
                folds += s.folds;
            }
            Err(_) => faults += 1,
        }
    }
    let n = config.n_samples;
    if faults as f64 > MAX_FAULT_FRACTION * n as f64 {
        return Err(Error::FaultFraction { faults, n });
    }
    let (mean, se) = mean_se(&values);
    let n_ok = values.len().max(1) as f64;
    Ok(McReport {
        estimate: mean,
        half_width_95: half_width_95(se),
        standard_error: se,
        n_samples: n,
        n_faults: faults,
        mean_folds: folds as f64 / n_ok,
        mean_weight: weights.iter().sum::<f64>() / n_ok,
        effective_sample_size: effective_sample_size(&weights),
        wall_time_seconds: clock.elapsed().as_secs_f64(),
        seed: config.seed,
    })
}

/// Distribution of the number of folds, capped paths in an overflow bucket.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldStats {
    /// `counts[k]` paths finished after exactly `k` iterations.
    pub counts: Vec<u64>,
    pub overflow: u64,
    /// Mean with capped paths counted at the cap.
    pub mean: f64,
    pub half_width_95: f64,
    pub quantiles: Vec<(f64, u64)>,
    pub n: u64,
}

impl FoldStats {
    /// `E[N^p]` with capped paths at the cap.
    pub fn moment(&self, p: f64, cap: u64) -> f64 {
        let mut s: f64 = self.counts.iter().enumerate().map(|(k, c)| *c as f64 * (k as f64).powf(p)).sum();
        s += self.overflow as f64 * (cap as f64).powf(p);
        s / self.n as f64
    }
}

/// Fold-count histogram of the experiment; faults are not an error here.
pub fn folding_stats(config: &EstimatorConfig) -> Result<FoldStats> {
    let outcomes = simulate_all(config)?;
    let mut counts = Vec::new();
    let mut overflow = 0;
    let mut all = Vec::with_capacity(outcomes.len());
    for o in &outcomes {
        match o {
            Ok(s) => {
                let k = s.folds as usize;
                if counts.len() <= k {
                    counts.resize(k + 1, 0);
                }
                counts[k] += 1;
                all.push(s.folds);
            }
            Err(p) => {
                overflow += 1;
                all.push(p.folds.max(config.fold_cap));
            }
        }
    }
    let as_f: Vec<f64> = all.iter().map(|&k| k as f64).collect();
    let (mean, se) = mean_se(&as_f);
    all.sort_unstable();
    let quantiles = [0.5, 0.9, 0.99]
        .iter()
        .map(|&q| {
            let i = ((q * all.len() as f64).ceil() as usize).clamp(1, all.len()) - 1;
            (q, all[i])
        })
        .collect();
    Ok(FoldStats {
        counts,
        overflow,
        mean,
        half_width_95: half_width_95(se),
        quantiles,
        n: config.n_samples,
    })
}

/// `(epsilon, fold statistics)` for each threshold.
pub fn epsilon_sweep(config: &EstimatorConfig, epsilons: &[f64]) -> Result<Vec<(f64, FoldStats)>> {
    epsilons
        .iter()
        .map(|&e| {
            let mut c = config.clone();
            c.epsilon = e;
            folding_stats(&c).map(|s| (e, s))
        })
        .collect()
}

/// Mean and variance `(pi^2 / 4m^2, (2/3) (pi / 2m)^4)` of the exit time of
/// the interval of half-width `pi/2m` by a standard Brownian motion started
/// at its centre: the clock between two folds in the skew-product picture.
pub fn double_barrier_constants(m: u32) -> (f64, f64) {
    let h = PI / (2.0 * m as f64);
    (h * h, 2.0 / 3.0 * h.powi(4))
}

/// The side on which a stopped sample ended, if any, as a label.
pub fn side_label(s: &PathSample) -> &'static str {
    match s.boundary {
        Some(Side::Minus) => "minus",
        Some(Side::Plus) => "plus",
        None => "",
    }
}
