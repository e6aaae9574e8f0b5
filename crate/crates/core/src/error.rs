use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied arguments that violate an operation's preconditions.
    #[error("usage error: {0}")]
    Usage(String),

    /// A scenario configuration failed validation.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    /// Adaptive quadrature exhausted its refinement depth.
    #[error(
        "quadrature did not converge on [{a:e}, {b:e}]: estimate {estimate:e}, \
         error estimate {error:e} > tolerance {tolerance:e} at depth {depth}"
    )]
    Quadrature { a: f64, b: f64, estimate: f64, error: f64, tolerance: f64, depth: u32 },

    /// A time step produced a probability entry below the rejection threshold.
    #[error("step rejected at t = {t:e} (dt = {dt:e}): entry {value:e} is negative; reduce dt")]
    StepRejected { t: f64, dt: f64, value: f64 },

    /// The thinning bound was exceeded by an actual exit rate.
    #[error("thinning bound violated at t = {t:e}: exit rate {rate:e} > bound {bound:e}")]
    ThinningBound { t: f64, rate: f64, bound: f64 },

    /// A computed result broke a numerical tolerance or physical invariant.
    #[error("numerical tolerance breach: {0}")]
    Tolerance(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }
}
