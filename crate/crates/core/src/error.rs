use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("coincident points: use the coincidence-limit evaluation")]
    Coincidence,

    #[error("quadrature did not converge near f = {f_thz} THz, k_par in [{k_lo}, {k_hi}] rad/um (error estimate {error:e})")]
    Quadrature {
        f_thz: f64,
        k_lo: f64,
        k_hi: f64,
        error: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("phase unwrap failed between {f_lo} and {f_hi} THz")]
    Unwrap { f_lo: f64, f_hi: f64 },

    #[error("no usable band: {0}")]
    EmptyBand(String),

    #[error("cross-correlation has no significant peak")]
    FlatCorrelation,

    #[error("peak signal-to-noise ratio {snr:.2} below floor {floor:.2}")]
    LowSnr { snr: f64, floor: f64 },

    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn file(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::File {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
