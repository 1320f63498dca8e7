use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A point lies outside the admissible domain of an objective.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("curvature undefined: {0}")]
    UndefinedCurvature(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e}): {context}")]
    Convergence {
        iterations: usize,
        residual: f64,
        context: String,
        /// Best iterate at the point of failure, widened to f64.
        best: Vec<f64>,
    },

    /// The problem has no feasible point; `violation` is the smallest maximum
    /// constraint violation found (log scale for geometric programs).
    #[error("infeasible: best maximum constraint violation {violation:e}")]
    Infeasible { violation: f64 },

    #[error("problem too large for exact oracle: {0}")]
    TooLarge(String),

    #[error("formulation error: {0}")]
    Formulation(String),
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
