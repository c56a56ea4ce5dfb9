use thiserror::Error;

use crate::sampler::PathSample;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid wedge <{alpha_minus}, {alpha_plus}>")]
    InvalidWedge { alpha_minus: f64, alpha_plus: f64 },

    #[error("wedge opening {opening} is not of the form pi/m")]
    NotPiOverM { opening: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point lies outside the wedge or region")]
    OutsideRegion,

    #[error("covariance factor is not invertible")]
    SingularMatrix,

    #[error("non-finite input")]
    NonFinite,

    #[error("series did not converge within {max_terms} terms")]
    SeriesCapExceeded { max_terms: usize },

    #[error("quadrature did not reach tolerance (estimated error {estimated_error:e})")]
    Quadrature { estimated_error: f64 },

    #[error("acceptance ratio {ratio} outside [0, 1]")]
    AcceptanceRatio { ratio: f64 },

    /// The recursion hit its iteration cap. The partial sample carries the
    /// state reached when the cap fired.
    #[error("iteration cap {cap} exceeded")]
    IterationCap { cap: u64, partial: Box<PathSample> },

    #[error("{faults} of {n} paths faulted (more than 10%)")]
    FaultFraction { faults: u64, n: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn ensure_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}
