use thiserror::Error;

/// Errors produced by the solver and its numerical building blocks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Green function evaluated on its diagonal.
    #[error("singular evaluation: {0}")]
    Singular(String),

    /// A kernel branch that this crate does not implement (e.g. alpha == n).
    #[error("unsupported branch: {0}")]
    UnsupportedBranch(String),

    /// A rejection sampler exhausted its proposal budget.
    #[error("sampling failed: {0}")]
    Sampling(String),

    /// A walk did not terminate within `max_steps`.
    #[error("walk exceeded the step cap of {max_steps}")]
    StepCap { max_steps: usize },

    /// The source or exterior data returned a non-finite value.
    #[error("field evaluation produced {value} at {point:?}")]
    Evaluation { point: Vec<f64>, value: f64 },

    /// Every path of an estimate failed.
    #[error("estimation failed: {0}")]
    Estimation(String),

    /// Deterministic quadrature failed to reach its tolerance.
    #[error("oracle did not converge: {0}")]
    Oracle(String),

    /// Two sequences that must be paired have different lengths.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
