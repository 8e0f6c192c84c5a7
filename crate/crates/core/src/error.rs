use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sample needs at least two values, got {0}")]
    DegenerateSample(usize),

    #[error("value {value} lies outside the support [{lo}, {hi}]")]
    OutOfSupport { value: f64, lo: f64, hi: f64 },

    #[error("operation requires a compactly supported distribution")]
    UnboundedSupport,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("density validation failed: {0}")]
    InvalidDensity(String),

    #[error(
        "rejection sampling gave up after {0} proposals; the density exceeds its declared bound"
    )]
    RejectionFailure(u64),

    #[error("matrix is not symmetric: max |a_ij - a_ji| = {0:e}")]
    NotSymmetric(f64),

    #[error("Jacobi iteration did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("too few event hits ({hits}) under the {law} law for a conditional estimate")]
    InsufficientMass { law: &'static str, hits: u64 },
}

impl Error {
    pub(crate) fn invalid_parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
