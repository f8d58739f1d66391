use thiserror::Error;

/// Errors raised by state construction, measurement set-up and protocol validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QkdError {
    #[error("non-finite value for {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("state not normalized: |alpha|^2 + |beta|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("ensemble weights invalid: {0}")]
    InvalidEnsemble(String),

    #[error("reflectivity must lie in [0, 1], got {0}")]
    Reflectivity(f64),

    #[error("probability {what} must lie in {range}, got {value}")]
    Probability {
        what: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("states are identical up to global phase; discrimination is impossible")]
    Indistinguishable,

    #[error("both signal states are the vacuum; the photon count is zero")]
    ZeroPhotonNumber,

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = QkdError> = std::result::Result<T, E>;
