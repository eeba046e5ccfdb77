use thiserror::Error;

/// Errors raised by the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("insufficient scan range: found {found} of {requested} roots below {limit}")]
    InsufficientScanRange {
        found: usize,
        requested: usize,
        limit: f64,
    },

    #[error("eigenvalue audit failed: {0}")]
    Audit(String),

    #[error("integration failed at s = {at}: {reason}")]
    Integration { at: f64, reason: String },

    #[error("hopf-cole state not positive: {0}")]
    Positivity(String),

    #[error("series truncated too aggressively at t = {t}; use at least {suggested} terms")]
    Truncation { t: f64, suggested: usize },

    #[error("velocity denominator underflow at r = {r}, t = {t}")]
    Underflow { r: f64, t: f64 },

    #[error("boundary data missing: characteristic reaches r = {r} at t = {t} where no density is prescribed")]
    DataInsufficient { r: f64, t: f64 },

    #[error("potential is not Lipschitz: {0}")]
    NonLipschitz(String),

    #[error("origin: {0}")]
    Origin(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
