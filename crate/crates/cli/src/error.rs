use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] drsub::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Short machine-readable kind for the error JSON on stderr.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => match e {
                drsub::Error::DimensionMismatch { .. } => "dimension_mismatch",
                drsub::Error::InvalidArgument(_) => "invalid_argument",
                drsub::Error::Domain(_) => "domain",
                drsub::Error::Unsupported(_) => "unsupported",
                drsub::Error::Precondition(_) => "precondition",
                drsub::Error::UndefinedCurvature(_) => "undefined_curvature",
                drsub::Error::Convergence { .. } => "convergence",
                drsub::Error::Infeasible { .. } => "infeasible",
                drsub::Error::TooLarge(_) => "too_large",
                drsub::Error::Formulation(_) => "formulation",
            },
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Config(_) => "config",
            CliError::Json(_) => "json",
            CliError::CheckFailed(_) => "check_failed",
        }
    }
}
