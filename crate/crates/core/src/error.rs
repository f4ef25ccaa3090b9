use thiserror::Error;

/// Errors raised by field operations, the solver, diagnostics and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Inverse Laplacian applied to a source with nonzero mean.
    #[error("source is not solvable: mean {mean:e} exceeds tolerance relative to norm {norm:e}")]
    NonSolvableSource { mean: f64, norm: f64 },

    /// Pressure source has a nonzero mean, which a periodic divergence-free
    /// velocity cannot produce.
    #[error("pressure gauge error: source mean {mean:e} relative to norm {norm:e}")]
    Gauge { mean: f64, norm: f64 },

    #[error("numerical instability at t = {t}: {reason}")]
    Instability { t: f64, reason: String },

    /// Two routes to the same quantity disagree beyond round-off.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("ball contains no grid node")]
    EmptyBall,

    #[error("not ready: {0}")]
    NotReady(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
