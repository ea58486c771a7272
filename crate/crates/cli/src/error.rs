use std::path::PathBuf;

use flagricci_core::Error as CoreError;

/// Exit code for success.
pub const EXIT_OK: u8 = 0;
/// Exit code for internal errors and failed checks.
pub const EXIT_FAILURE: u8 = 1;
/// Exit code for usage errors: bad flags, unknown spaces, invalid metrics.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{0}")]
    ChecksFailed(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Core(
                CoreError::UnknownSpace(_)
                | CoreError::ParameterOutOfRange { .. }
                | CoreError::NonPositiveMetric { .. }
                | CoreError::DimensionMismatch { .. }
                | CoreError::InvalidDimensions(_)
                | CoreError::InvalidArgument(_)
                | CoreError::AffineChart,
            ) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
