//! Number of folds of the reflected sampler: the heavy tail of the exact
//! algorithm and the effect of the corner threshold.

use wedgesim::geometry::{sub_wedge_index, PolarPoint};
use wedgesim::mc::{double_barrier_constants, epsilon_sweep, folding_stats, EstimatorConfig, Mode, TestFunction};
use wedgesim::Result;

pub fn run() -> Result<()> {
    let mut c = EstimatorConfig::new(0.9, PolarPoint::new(1.5, 0.3), Mode::Reflected, TestFunction::Constant1);
    c.epsilon = 0.0;
    c.fold_cap = 150;
    c.n_samples = 20_000;
    c.seed = 7;
    let s = folding_stats(&c)?;
    println!("exact algorithm, cap 150");
    for (lo, hi) in [(0, 5), (6, 10), (11, 20), (21, 50), (51, 149)] {
        let count: u64 = s.counts.iter().enumerate().filter(|(k, _)| *k >= lo && *k <= hi).map(|(_, c)| c).sum();
        println!("  N in [{lo}, {hi}]: {count}");
    }
    println!("  N >= 150: {}", s.overflow);
    println!("  E N^0.4 = {:.3}, E N^0.6 = {:.3}", s.moment(0.4, 150), s.moment(0.6, 150));

    c.fold_cap = 1_000_000;
    c.n_samples = 10_000;
    for (eps, s) in epsilon_sweep(&c, &[0.01, 0.02, 0.05, 0.1])? {
        println!("eps {eps}: mean folds {:.3} +- {:.3}", s.mean, s.half_width_95);
    }

    let m = sub_wedge_index(0.9);
    let (mean, var) = double_barrier_constants(m);
    println!("clock between folds for m = {m}: mean {mean:.4}, variance {var:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
