use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The homodyne angle pair has `sin(2θ₋) ≈ 0`; the gadget does not implement a unitary.
    #[error("degenerate measurement angles ({theta_a}, {theta_b}): |sin 2θ₋| = {sin_two_minus:e}")]
    DegenerateAngles {
        theta_a: f64,
        theta_b: f64,
        sin_two_minus: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("unsupported gate `{0}`")]
    UnsupportedGate(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
