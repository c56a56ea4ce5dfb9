//! Exact samplers: the exit law of a `pi/m` wedge, the conditioned survivor,
//! the recursive stopped and reflected algorithms and their shortcuts.

mod exit;
mod quadrant;
mod reflected;
mod stopped;

pub use exit::{
    exit_radius_from_uniform, sample_exit_radius, sample_exit_side, sample_exit_time,
    sample_survivor,
};
pub use quadrant::{quadrant_reflected, quadrant_stopped};
pub use reflected::{
    algorithm_ii, direct_pi_over_m_reflected, sample_reflected_from_origin, ReflectedOptions,
};
pub use stopped::algorithm_i;

use crate::density::Side;
use crate::geometry::PolarPoint;

/// Default cap on the number of iterations of the recursive samplers.
pub const DEFAULT_FOLD_CAP: u64 = 1_000_000;

/// Terminal state of one simulated path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSample {
    /// `W_{T ^ tau}` for the stopped samplers, `X_T` for the reflected ones.
    pub endpoint: PolarPoint,
    /// `T ^ tau`.
    pub elapsed: f64,
    /// Ray on which the path stopped, if it did.
    pub boundary: Option<Side>,
    /// Number of iterations, the last one included.
    pub folds: u64,
    /// Logarithm of the Girsanov weight.
    pub log_weight: f64,
    /// The corner kernel produced the endpoint.
    pub approx_used: bool,
    /// Endpoint of the driving (unreflected) Brownian motion, cartesian.
    pub driving_endpoint: Option<[f64; 2]>,
}

impl PathSample {
    pub fn hit_boundary(&self) -> bool {
        self.boundary.is_some()
    }

    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }

    pub fn cartesian(&self) -> [f64; 2] {
        self.endpoint.cartesian()
    }
}
