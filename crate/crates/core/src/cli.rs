//! Command-line interface.
//!
//! Six subcommands write CSV to `--out` or standard output:
//!
//! * `density`: long-format grid `r,theta,value` of a transition density per
//!   `dr dtheta`.
//! * `sample-stopped`, `sample-reflected`: one row per path.
//! * `estimate`: one Monte Carlo estimate with its configuration echoed.
//! * `folds`: fold-count histogram, or mean folds per threshold with
//!   `--eps-sweep`.
//! * `ito`: Euler scheme for `dY = -mu (Y - kappa) dt + sigma dW`.
//!
//! `--config file` reads `key=value` lines that act as flags placed before
//! the command-line ones, so flags override the file. Exit codes: 0 on
//! success, 1 when more than 10% of paths fault or on I/O failure, 2 on
//! invalid input.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::density::{
    area_to_polar, killed_density_images, killed_density_series, reflected_density_images,
    reflected_density_series,
};
use crate::drift::LinearField;
use crate::error::{Error, Result};
use crate::geometry::{decorrelate, sub_wedge_index, CorrelatedSetup, Mat2, PolarPoint, RegionCase, WedgeSpec};
use crate::mc::{
    double_barrier_constants, epsilon_sweep, estimate, folding_stats, side_label, simulate_all, EstimatorConfig,
    ItoSpec, McReport, Mode, TestFunction, MAX_FAULT_FRACTION,
};
use crate::special::SeriesTolerance;

/// Header of the `estimate` and `ito` outputs.
pub const ESTIMATE_HEADER: &str = "mode,f,alpha,r0,theta0,T,eps,drift_x,drift_y,n,n_faults,estimate,half_width,standard_error,mean_folds,mean_weight,ess,seconds,seed,flag";
/// Header of the `sample-*` outputs. `x,y` are in the input coordinates,
/// `r,theta` in the standard wedge.
pub const SAMPLE_HEADER: &str = "index,status,x,y,r,theta,elapsed,side,folds,weight,approx";
pub const DENSITY_HEADER: &str = "r,theta,value";
pub const FOLDS_HEADER: &str = "kind,label,value";
pub const SWEEP_HEADER: &str = "eps,mean_folds,half_width,n,overflow";

#[derive(Parser, Debug)]
#[command(name = "wedgesim", about = "Exact simulation of Brownian motion in wedges", args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transition density on a polar grid.
    Density(DensityArgs),
    /// Paths stopped at the boundary.
    SampleStopped(Common),
    /// Paths reflected on the boundary.
    SampleReflected(Common),
    /// Monte Carlo estimate of a test function.
    Estimate(EstimateArgs),
    /// Fold-count statistics of the reflected sampler.
    Folds(FoldsArgs),
    /// Euler scheme for a mean-reverting Itô process.
    Ito(ItoArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Wedge opening.
    #[arg(long)]
    alpha: Option<f64>,
    /// Start in polar coordinates `r,theta`.
    #[arg(long, value_parser = parse_pair)]
    start: Option<[f64; 2]>,
    /// Start in cartesian coordinates `x,y`; takes precedence over `--start`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    x: Option<[f64; 2]>,
    /// Horizon; `inf` is allowed for stopped paths.
    #[arg(long = "T", visible_alias = "t")]
    horizon: Option<f64>,
    /// Corner threshold of the reflected sampler.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    fold_cap: Option<u64>,
    /// Number of paths.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sigma1: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    /// Slope `a` of the ray `y = a x` of a correlated problem.
    #[arg(long, allow_hyphen_values = true)]
    slope: Option<f64>,
    /// `and-pos`, `and-neg`, `or-pos` or `or-neg`.
    #[arg(long)]
    region: Option<String>,
    /// Constant drift `bx,by`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    drift: Option<[f64; 2]>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Write `NA` in the seconds column.
    #[arg(long)]
    no_timing: bool,
    /// File of `key=value` lines read as flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[command(flatten)]
    common: Common,
    /// `reflected` or `killed`.
    #[arg(long, default_value = "reflected")]
    mode: String,
    /// Points per axis.
    #[arg(long, default_value_t = 50)]
    grid: usize,
    /// Largest radius of the grid; `r0 + 4 sqrt(T)` by default.
    #[arg(long)]
    rmax: Option<f64>,
    /// `auto`, `images` or `series`.
    #[arg(long, default_value = "auto")]
    method: String,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    common: Common,
    /// `stopped` or `reflected`.
    #[arg(long)]
    mode: Option<String>,
    /// Test function: radius-sq, sin-sq-theta, coord1, survival, one, elapsed.
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    table1_stopped: bool,
    #[arg(long)]
    table1_reflected: bool,
    #[arg(long)]
    table2_stopped: bool,
    #[arg(long)]
    table2_reflected: bool,
}

#[derive(Args, Debug)]
struct FoldsArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated thresholds.
    #[arg(long)]
    eps_sweep: Option<String>,
}

#[derive(Args, Debug)]
struct ItoArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    mu: Option<[f64; 2]>,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    kappa: Option<[f64; 2]>,
    #[arg(long)]
    steps: Option<usize>,
    /// `stopped` or `reflected`.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    table3_stopped: bool,
    #[arg(long)]
    table3_reflected: bool,
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated numbers, got {s:?}"));
    }
    let a = parts[0].parse::<f64>().map_err(|e| e.to_string())?;
    let b = parts[1].parse::<f64>().map_err(|e| e.to_string())?;
    Ok([a, b])
}

/// Values a preset supplies when the matching flag is absent.
#[derive(Clone, Copy, Debug)]
struct Preset {
    alpha: f64,
    start: [f64; 2],
    horizon: f64,
    eps: f64,
    n: u64,
    f: TestFunction,
    reflected: bool,
}

const TABLE1: Preset = Preset {
    alpha: 0.9,
    start: [1.5, 0.3],
    horizon: 1.0,
    eps: 0.03,
    n: 10_000,
    f: TestFunction::RadiusSq,
    reflected: false,
};

const TABLE2: Preset = Preset {
    alpha: 0.58,
    start: [3.0, 0.4],
    horizon: 1.0,
    eps: 0.03,
    n: 10_000,
    f: TestFunction::SinSqTheta,
    reflected: false,
};

/// Runs the interface on `argv` (program name first) and returns the exit
/// code.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = match &cli.command {
        Command::Density(a) => a.common.threads,
        Command::SampleStopped(c) | Command::SampleReflected(c) => c.threads,
        Command::Estimate(a) => a.common.threads,
        Command::Folds(a) => a.common.threads,
        Command::Ito(a) => a.common.threads,
    };
    let result = match threads {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Error::InvalidParameter(e.to_string())),
        },
        None => dispatch(&cli.command),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// 2 for invalid input, 1 for faults and I/O.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidWedge { .. }
        | Error::NotPiOverM { .. }
        | Error::InvalidParameter(_)
        | Error::OutsideRegion
        | Error::SingularMatrix
        | Error::NonFinite => 2,
        _ => 1,
    }
}

/// Inserts the lines of the `--config` file right after the subcommand.
fn expand_config(argv: Vec<String>) -> std::result::Result<Vec<String>, String> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    if argv.len() < 2 {
        return Ok(argv);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", n + 1))?;
        let k = k.trim().trim_start_matches("--");
        let v = v.trim();
        if k == "config" || v == "false" {
            continue;
        }
        extra.push(format!("--{k}"));
        if v != "true" {
            extra.push(v.to_string());
        }
    }
    let mut out = argv[..2].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[2..]);
    Ok(out)
}

fn dispatch(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Density(a) => run_density(a),
        Command::SampleStopped(c) => run_sample(c, Mode::Stopped),
        Command::SampleReflected(c) => run_sample(c, Mode::Reflected),
        Command::Estimate(a) => run_estimate(a),
        Command::Folds(a) => run_folds(a),
        Command::Ito(a) => run_ito(a),
    }
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout())),
    })
}

fn parse_mode(s: &str) -> Result<bool> {
    match s {
        "stopped" => Ok(false),
        "reflected" => Ok(true),
        other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
    }
}

fn parse_test_function(s: &str) -> Result<TestFunction> {
    TestFunction::parse(s).ok_or_else(|| Error::InvalidParameter(format!("unknown test function {s:?}")))
}

fn is_correlated(c: &Common) -> bool {
    c.sigma1.is_some() || c.sigma2.is_some() || c.rho.is_some() || c.slope.is_some() || c.region.is_some()
}

/// Builds the experiment in standard coordinates from the common flags.
fn base_config(c: &Common, preset: &Preset, mode: Mode, f: TestFunction) -> Result<EstimatorConfig> {
    let mut config = if is_correlated(c) {
        let slope = c
            .slope
            .ok_or_else(|| Error::InvalidParameter("correlated input needs --slope".into()))?;
        let region: RegionCase = c
            .region
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("correlated input needs --region".into()))?
            .parse()?;
        let start = match (c.x, c.start) {
            (Some(x), _) => x,
            (None, Some(p)) => PolarPoint::new(p[0], p[1]).cartesian(),
            (None, None) => return Err(Error::InvalidParameter("correlated input needs --x".into())),
        };
        let setup = CorrelatedSetup {
            sigma1: c.sigma1.unwrap_or(1.0),
            sigma2: c.sigma2.unwrap_or(1.0),
            rho: c.rho.unwrap_or(0.0),
            slope,
            region,
            start,
            drift: c.drift.unwrap_or([0.0, 0.0]),
        };
        EstimatorConfig::from_problem(&decorrelate(&setup)?, mode, f)
    } else {
        let alpha = c.alpha.unwrap_or(preset.alpha);
        let wedge = WedgeSpec::with_opening(alpha)?;
        let start = match (c.x, c.start) {
            (Some(x), _) => PolarPoint::from_cartesian(x),
            (None, Some(p)) => PolarPoint::new(p[0], p[1]),
            (None, None) => PolarPoint::new(preset.start[0], preset.start[1]),
        };
        if !(start.r >= 0.0) || !wedge.contains(start) {
            return Err(Error::OutsideRegion);
        }
        let mut config = EstimatorConfig::new(alpha, start, mode, f);
        config.drift = c.drift.unwrap_or([0.0, 0.0]);
        config
    };
    config.horizon = c.horizon.unwrap_or(preset.horizon);
    config.epsilon = c.eps.unwrap_or(preset.eps);
    if let Some(cap) = c.fold_cap {
        config.fold_cap = cap;
    }
    config.n_samples = c.n.unwrap_or(preset.n);
    config.seed = c.seed.unwrap_or(0);
    crate::error::ensure_finite(&[config.alpha, config.start.r, config.start.theta, config.epsilon])?;
    config.validate()?;
    Ok(config)
}

fn run_density(a: &DensityArgs) -> Result<()> {
    let killed = match a.mode.as_str() {
        "reflected" => false,
        "killed" => true,
        other => return Err(Error::InvalidParameter(format!("unknown density mode {other:?}"))),
    };
    if a.grid == 0 {
        return Err(Error::InvalidParameter("grid must be positive".into()));
    }
    let config = base_config(&a.common, &TABLE1, Mode::Reflected, TestFunction::Constant1)?;
    let t = config.horizon;
    if !t.is_finite() {
        return Err(Error::InvalidParameter("density needs a finite time".into()));
    }
    let wedge = WedgeSpec::with_opening(config.alpha)?;
    let x = config.start;
    let images = match a.method.as_str() {
        "auto" => wedge.pi_over_m().is_some(),
        "images" => true,
        "series" => false,
        other => return Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
    };
    let pi_m = if images { Some(wedge.as_pi_over_m()?) } else { None };
    let rmax = a.rmax.unwrap_or(x.r + 4.0 * t.sqrt());
    if !(rmax > 0.0) {
        return Err(Error::InvalidParameter("rmax must be positive".into()));
    }
    let tol = SeriesTolerance::default();
    let g = a.grid;
    let mut w = csv::Writer::from_writer(writer(&a.common.out)?);
    w.write_record(DENSITY_HEADER.split(','))?;
    for i in 0..g {
        let r = rmax * (i as f64 + 0.5) / g as f64;
        for j in 0..g {
            let theta = config.alpha * (j as f64 + 0.5) / g as f64;
            let y = PolarPoint::new(r, theta);
            let v = match (&pi_m, killed) {
                (Some(pm), false) => area_to_polar(reflected_density_images(pm, x, y, t)?, r),
                (Some(pm), true) => area_to_polar(killed_density_images(pm, x, y, t)?, r),
                (None, false) => reflected_density_series(&wedge, x, y, t, tol)?,
                (None, true) => killed_density_series(&wedge, x, y, t, tol)?,
            };
            w.write_record([r.to_string(), theta.to_string(), v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn check_faults(faults: u64, n: u64) -> Result<()> {
    if faults as f64 > MAX_FAULT_FRACTION * n as f64 {
        Err(Error::FaultFraction { faults, n })
    } else {
        Ok(())
    }
}

fn run_sample(c: &Common, mode: Mode) -> Result<()> {
    let preset = Preset { n: 1000, ..TABLE1 };
    let config = base_config(c, &preset, mode, TestFunction::Constant1)?;
    let outcomes = simulate_all(&config)?;
    let faults = outcomes.iter().filter(|o| o.is_err()).count() as u64;
    check_faults(faults, config.n_samples)?;
    let mut w = csv::Writer::from_writer(writer(&c.out)?);
    w.write_record(SAMPLE_HEADER.split(','))?;
    for (i, o) in outcomes.iter().enumerate() {
        let (status, s) = match o {
            Ok(s) => ("ok", s),
            Err(s) => ("capped", s),
        };
        let x = config.output_map.apply(s.cartesian());
        w.write_record([
            i.to_string(),
            status.to_string(),
            x[0].to_string(),
            x[1].to_string(),
            s.endpoint.r.to_string(),
            s.endpoint.theta.to_string(),
            s.elapsed.to_string(),
            side_label(s).to_string(),
            s.folds.to_string(),
            s.weight().to_string(),
            (s.approx_used as u8).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn report_record(config: &EstimatorConfig, r: &McReport, no_timing: bool) -> Vec<String> {
    let seconds = if no_timing {
        "NA".to_string()
    } else {
        format!("{:.3}", r.wall_time_seconds)
    };
    vec![
        config.mode.name().to_string(),
        config.test_function.name().to_string(),
        config.alpha.to_string(),
        config.start.r.to_string(),
        config.start.theta.to_string(),
        config.horizon.to_string(),
        config.epsilon.to_string(),
        config.drift[0].to_string(),
        config.drift[1].to_string(),
        r.n_samples.to_string(),
        r.n_faults.to_string(),
        r.estimate.to_string(),
        r.half_width_95.to_string(),
        r.standard_error.to_string(),
        r.mean_folds.to_string(),
        r.mean_weight.to_string(),
        r.effective_sample_size.to_string(),
        seconds,
        r.seed.to_string(),
        if r.n_faults > 0 { "faults" } else { "" }.to_string(),
    ]
}

fn write_report(c: &Common, config: &EstimatorConfig, r: &McReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer(&c.out)?);
    w.write_record(ESTIMATE_HEADER.split(','))?;
    w.write_record(report_record(config, r, c.no_timing))?;
    w.flush()?;
    Ok(())
}

fn run_estimate(a: &EstimateArgs) -> Result<()> {
    let chosen = [a.table1_stopped, a.table1_reflected, a.table2_stopped, a.table2_reflected];
    if chosen.iter().filter(|b| **b).count() > 1 {
        return Err(Error::InvalidParameter("at most one preset".into()));
    }
    let preset = if a.table1_reflected {
        Preset { reflected: true, ..TABLE1 }
    } else if a.table2_stopped {
        TABLE2
    } else if a.table2_reflected {
        Preset {
            reflected: true,
            n: 5_000,
            ..TABLE2
        }
    } else {
        TABLE1
    };
    let reflected = match &a.mode {
        Some(m) => parse_mode(m)?,
        None => preset.reflected,
    };
    let f = match &a.f {
        Some(f) => parse_test_function(f)?,
        None => preset.f,
    };
    let mode = if reflected { Mode::Reflected } else { Mode::Stopped };
    let config = base_config(&a.common, &preset, mode, f)?;
    let report = estimate(&config)?;
    write_report(&a.common, &config, &report)
}

fn run_folds(a: &FoldsArgs) -> Result<()> {
    let config = base_config(&a.common, &TABLE1, Mode::Reflected, TestFunction::Constant1)?;
    let mut w = csv::Writer::from_writer(writer(&a.common.out)?);
    if let Some(list) = &a.eps_sweep {
        let eps = list
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidParameter(format!("bad --eps-sweep: {e}")))?;
        w.write_record(SWEEP_HEADER.split(','))?;
        for (e, s) in epsilon_sweep(&config, &eps)? {
            w.write_record([
                e.to_string(),
                s.mean.to_string(),
                s.half_width_95.to_string(),
                s.n.to_string(),
                s.overflow.to_string(),
            ])?;
        }
    } else {
        let s = folding_stats(&config)?;
        w.write_record(FOLDS_HEADER.split(','))?;
        for (k, c) in s.counts.iter().enumerate() {
            w.write_record(["count", &k.to_string(), &c.to_string()])?;
        }
        w.write_record(["overflow", &format!(">={}", config.fold_cap), &s.overflow.to_string()])?;
        w.write_record(["mean", "", &s.mean.to_string()])?;
        w.write_record(["half_width", "", &s.half_width_95.to_string()])?;
        for (q, v) in &s.quantiles {
            w.write_record(["quantile", &q.to_string(), &v.to_string()])?;
        }
        for p in [0.4, 0.6] {
            w.write_record(["moment", &p.to_string(), &s.moment(p, config.fold_cap).to_string()])?;
        }
        let m = sub_wedge_index(config.alpha);
        let (mean, var) = double_barrier_constants(m);
        w.write_record(["double_barrier_mean", &m.to_string(), &mean.to_string()])?;
        w.write_record(["double_barrier_variance", &m.to_string(), &var.to_string()])?;
        w.write_record(["n", "", &s.n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn run_ito(a: &ItoArgs) -> Result<()> {
    if a.table3_stopped && a.table3_reflected {
        return Err(Error::InvalidParameter("at most one preset".into()));
    }
    let table3 = a.table3_stopped || a.table3_reflected;
    let preset = Preset {
        eps: if a.table3_reflected { 0.01 } else { 0.03 },
        n: if table3 { 500 } else { 1000 },
        reflected: a.table3_reflected,
        ..TABLE1
    };
    let reflected = match &a.mode {
        Some(m) => parse_mode(m)?,
        None => preset.reflected,
    };
    let f = match &a.f {
        Some(f) => parse_test_function(f)?,
        None => preset.f,
    };
    let c = &a.common;
    if c.slope.is_some() || c.region.is_some() {
        return Err(Error::InvalidParameter("ito takes the wedge from --alpha".into()));
    }
    let sigma = {
        let (s1, s2, rho) = (c.sigma1.unwrap_or(1.0), c.sigma2.unwrap_or(1.0), c.rho.unwrap_or(0.0));
        if !(s1 > 0.0 && s2 > 0.0 && rho > -1.0 && rho < 1.0) {
            return Err(Error::SingularMatrix);
        }
        let s = (1.0 - rho * rho).sqrt();
        Mat2([[s1 * s, s1 * rho], [0.0, s2]])
    };
    let plain = Common {
        sigma1: None,
        sigma2: None,
        rho: None,
        drift: None,
        ..c.clone()
    };
    let mode = if reflected { Mode::EulerReflected } else { Mode::EulerStopped };
    let mut config = base_config(&plain, &preset, Mode::Stopped, f)?;
    config.mode = mode;
    config.ito = Some(ItoSpec {
        field: LinearField {
            mu: a.mu.unwrap_or([0.1, 0.2]),
            kappa: a.kappa.unwrap_or([0.7, 0.5]),
            sigma,
        },
        steps: a.steps.unwrap_or(if table3 { 5000 } else { 100 }),
    });
    config.validate()?;
    let report = estimate(&config)?;
    write_report(c, &config, &report)
}
