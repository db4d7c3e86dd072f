use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A query reached beyond the largest generated circle.
    #[error("lattice exhausted: radius {radius} exceeds 2^{k_max}")]
    LatticeExhausted { radius: f64, k_max: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    /// Quadrature did not reach its target; carries the last two refinements.
    #[error("quadrature did not converge after {refinements} refinements (last {last}, previous {previous}, estimate {estimate:e})")]
    NonConvergence {
        refinements: u32,
        last: num_complex::Complex64,
        previous: num_complex::Complex64,
        estimate: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
