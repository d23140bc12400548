use nalgebra::DVector;
use nalgebra::Complex;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A linear solve hit a non-invertible block.
    #[error("singular linear system at {element}")]
    Singular { element: String },

    /// The steady-state generator has more than one stationary state. Each
    /// listed vector is a ground state that does not couple to the field.
    #[error("steady state is not unique: null space has dimension {dimension} ({} dark states)", dark_states.len())]
    DarkStateMultiplicity {
        dimension: usize,
        dark_states: Vec<DVector<Complex<f64>>>,
    },

    #[error("fixed point did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
