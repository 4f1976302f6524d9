use thiserror::Error;

/// Errors raised by the needle calculus and the inequality engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("argument {value} outside admissible domain {domain}")]
    Domain { value: f64, domain: String },

    #[error("infinite mean curvature: {0}")]
    InfiniteCurvature(String),

    #[error("degenerate surface: {0}")]
    DegenerateSurface(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("epsilon schedule: {0}")]
    Schedule(String),

    #[error("quadrature did not converge on [{a}, {b}]: estimated error {error:e}")]
    Quadrature { a: f64, b: f64, error: f64 },

    /// A bound that is a theorem came out violated. Always a bug in the caller
    /// or in this crate, never a property of the input.
    #[error("inequality violated ({statement}): lhs {lhs} exceeds rhs {rhs}")]
    Defect {
        statement: String,
        lhs: f64,
        rhs: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
