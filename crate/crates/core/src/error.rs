//! Error type shared by every module.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while parsing, evaluating or verifying.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed expression text.
    #[error("syntax error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    /// Identifier that is neither a known function nor a variable `x<k>`.
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownVariable { name: String, offset: usize },
    /// Sizes that should agree do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// Log of a non-positive number or division by zero.
    #[error("domain error in `{subtree}`: {msg}")]
    Domain { subtree: String, msg: String },
    /// A map that should be a submersion lost rank.
    #[error("rank drop at {point:?}: {msg}")]
    RankDrop { point: Vec<f64>, msg: String },
    /// A spray trajectory left the coordinate chart.
    #[error("trajectory left the chart at step {step} of {steps}")]
    ChartExit { step: usize, steps: usize },
    /// NaN or infinity appeared in a numerical computation.
    #[error("non-finite value: {0}")]
    NonFinite(String),
    /// Quadrature refinement did not settle.
    #[error("quadrature did not converge: N vs 2N differ by {0:e}")]
    Quadrature(f64),
    /// A map is not transverse to a Dirac structure.
    #[error("transversality fails at {point:?}: residual {residual:e}")]
    Transversality { point: Vec<f64>, residual: f64 },
    /// A user-supplied fiber-product chart is inconsistent.
    #[error("chart inconsistent: {msg} (residual {residual:e})")]
    ChartInconsistent { msg: String, residual: f64 },
    /// Invalid argument that does not fit another variant.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Manifest or pair file content is not usable.
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
