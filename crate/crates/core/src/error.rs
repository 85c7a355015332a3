use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("site {site} out of range for a chain of {n_spins} spins")]
    SiteOutOfRange { site: usize, n_spins: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("amplitudes are not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("krylov propagation stalled at t = {time}: residual estimate {residual:e} exceeds tolerance {tolerance:e}")]
    KrylovBreakdown {
        time: f64,
        residual: f64,
        tolerance: f64,
    },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("fit needs at least {needed} usable rows, found {found}")]
    DegenerateFit { needed: usize, found: usize },

    #[error("no calibration data available")]
    NoCalibration,

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed manifest: {0}")]
    Manifest(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
