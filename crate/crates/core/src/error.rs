use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// δ·max|κ| ≥ 1: the normal map of the core curve is not injective on the tube.
    #[error("tube self-overlap: delta * max|kappa| = {product:.6} (delta = {delta}, max|kappa| = {max_curvature}); need delta < 1/max|kappa|")]
    TubeSelfOverlap {
        delta: f64,
        max_curvature: f64,
        product: f64,
    },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("malformed domain: {0}")]
    MalformedDomain(String),

    #[error("nearest-point ambiguity at ({x}, {y}): distances {d1} and {d2}")]
    NearestPointAmbiguity { x: f64, y: f64, d1: f64, d2: f64 },

    #[error("zero-measure region")]
    ZeroMeasure,

    #[error("point ({0}, {1}) is outside the interpolation stencil")]
    Interpolation(f64, f64),

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("field too rough to lift at this resolution: jump of {jump:.4} rad between cells {a} and {b}")]
    TooRough { a: usize, b: usize, jump: f64 },

    #[error("not a gradient: curl residual {0:.4e} exceeds tolerance")]
    NotAGradient(f64),

    #[error("invalid projection at cell {cell}: identity defect {defect:.3e}")]
    InvalidProjection { cell: usize, defect: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}
