//! Exact simulation of planar Brownian motion stopped at, or normally
//! reflected on, the boundary of a wedge.
//!
//! The building blocks are the image-sum and Bessel-series transition
//! densities ([`density`]), the exit law of a wedge of opening `pi/m`
//! ([`sampler`]), two recursive algorithms that reach any opening by
//! chaining such wedges ([`sampler::algorithm_i`], [`sampler::algorithm_ii`]),
//! a corner approximation that keeps the reflected recursion short
//! ([`corner`]), Girsanov weights for constant drift and frozen-coefficient
//! Euler schemes for Itô processes ([`drift`]), and a Monte Carlo harness
//! ([`mc`]) with a command-line front end ([`cli`]).
//!
//! ```
//! use wedgesim::geometry::PolarPoint;
//! use wedgesim::rng::RngStream;
//! use wedgesim::sampler::{algorithm_i, DEFAULT_FOLD_CAP};
//!
//! let mut rng = RngStream::new(42);
//! let s = algorithm_i(PolarPoint::new(1.5, 0.3), 1.0, 0.9, DEFAULT_FOLD_CAP, &mut rng).unwrap();
//! assert!(s.endpoint.theta >= 0.0 && s.endpoint.theta <= 0.9);
//! ```

pub mod cli;
pub mod corner;
pub mod density;
pub mod drift;
pub mod error;
pub mod geometry;
pub mod mc;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
