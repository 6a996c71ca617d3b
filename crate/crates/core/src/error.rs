use thiserror::Error;

/// Errors raised by the geometry, field, weight, constant and verification layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid space (m={m}, k={k}, gamma={gamma}): {reason}")]
    InvalidSpace {
        m: usize,
        k: usize,
        gamma: f64,
        reason: String,
    },

    #[error("point has {got} coordinates, space expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular point: {0}")]
    Singular(String),

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("finite-difference step {step:e} exceeds half the clearance {clearance:e} to the singular set")]
    StepTooLarge { step: f64, clearance: f64 },

    /// A parameter constraint failed; the message names the violated inequality.
    #[error("{0}")]
    Constraint(String),

    #[error("invalid field spec: {0}")]
    InvalidField(String),

    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    #[error("field support leaves the admissible domain: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
