use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The channel has no real effective angular parameter (Zα too large).
    #[error("supercritical channel: square-root argument {argument:e} is not positive")]
    Supercritical { argument: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid level label: {0}")]
    InvalidLabel(String),

    /// Off-diagonal Jacobi elements vanish, so the continued-fraction
    /// coefficients are undefined. Callers switch to the diagonal case.
    #[error("singular continued-fraction coefficient at index {index} (off-diagonal element vanishes)")]
    SingularCoefficient { index: usize },

    #[error("continued fraction did not converge after {terms_used} terms (last residual {residual:e})")]
    NonConvergence { terms_used: usize, residual: f64 },

    #[error("matrix is near-singular (condition estimate {condition:e}); energy is close to a pole")]
    NearSingular { condition: f64 },

    #[error("truncated matrix is singular at this energy; perturb the energy and retry")]
    SingularTruncation,

    #[error("quadrature residual {residual:e} exceeds tolerance {tolerance:e}")]
    QuadratureTolerance { residual: f64, tolerance: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("no sign change of the determinant in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
