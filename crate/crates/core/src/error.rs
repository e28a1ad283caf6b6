use thiserror::Error;

/// Errors raised by the distribution, estimation, inference and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative routine ran out of its iteration budget.
    #[error("no convergence: {0}")]
    Convergence(String),

    /// The sample satisfies mean² ≤ variance, so the moment estimators are undefined.
    #[error("degenerate sample: mean^2 - variance = {gap:e} is not positive")]
    DegenerateSample { gap: f64 },

    /// The asymptotic covariance matrix is numerically singular.
    #[error("singular covariance matrix (det = {det:e})")]
    SingularCovariance { det: f64 },

    /// A simulation configuration violates its invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The requested quantity exceeds the range of `f64`.
    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
