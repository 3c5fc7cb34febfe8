//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A pulse-time vector violates the sequence invariants.
    #[error("invalid pulse sequence: {0}")]
    InvalidSequence(String),

    /// Adaptive quadrature hit its depth limit before reaching the
    /// requested tolerance; carries the achieved error estimate.
    #[error(
        "quadrature did not converge: achieved error estimate {achieved:.3e} \
         exceeds requested {requested:.3e}"
    )]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    /// Quadrature configuration violates a precondition (e.g. the upper
    /// limit is below the filter-norm concentration band).
    #[error("invalid quadrature configuration: {0}")]
    InvalidQuadrature(String),

    /// Spectrum construction or validation failed.
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    /// The trajectory oracle only supports DC-centered components.
    #[error("trajectory oracle requires a DC-centered component, got center {0}")]
    UnsupportedCenter(f64),

    /// Spectrum not usable for timescale extraction.
    #[error("non-positive spectral integral: {0}")]
    NonPositiveIntegral(f64),

    /// Sequence-family construction failed.
    #[error("invalid sequence family: {0}")]
    InvalidFamily(String),

    /// Piecewise-linear map construction or composition failed.
    #[error("invalid piecewise-linear map: {0}")]
    InvalidMap(String),

    /// A degenerate starting fidelity makes the reward undefined.
    #[error("degenerate initial fidelity {0}: no decoupling needed")]
    DegenerateInitialFidelity(f64),

    /// Network input/parameter shapes do not match.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Network input or loss left the finite range.
    #[error("non-finite value in {context}: {value}")]
    NonFinite { context: String, value: f64 },

    /// Malformed action word in a trace request.
    #[error("malformed action word: {0}")]
    MalformedActionWord(String),

    /// Checkpoint or artifact file is malformed.
    #[error("malformed file {path}: {reason}")]
    MalformedFile { path: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
