use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = GlccError> = std::result::Result<T, E>;

/// Errors raised anywhere in the library.
///
/// Every variant maps onto one of three coarse categories (see [`ErrorKind`])
/// that the command-line driver turns into process exit codes.
#[derive(Debug, Error)]
pub enum GlccError {
    /// A hyperparameter or argument is outside its valid range.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// Configuration files disagree with each other or with the request.
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    /// Input data is malformed, misaligned or inconsistent.
    #[error("invalid data: {0}")]
    Data(String),

    /// Training was asked to run without a single labeled sample.
    #[error("no supervision: at least one labeled sample is required")]
    NoSupervision,

    /// A computation produced a non-finite value or a solve failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The objective went up during alternating minimization. The updates are
    /// exact block minimizers, so this always indicates a defect.
    #[error("objective increased at iteration {iteration} ({step}): {before:e} -> {after:e}")]
    ObjectiveIncrease {
        iteration: usize,
        step: &'static str,
        before: f64,
        after: f64,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

/// Coarse error category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numerical,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Config => "config-error",
            ErrorKind::Data => "data-error",
            ErrorKind::Numerical => "numerical-error",
        }
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Data => 3,
            ErrorKind::Numerical => 4,
        }
    }
}

impl GlccError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            GlccError::Param(_) | GlccError::ConfigMismatch(_) => ErrorKind::Config,
            GlccError::Data(_)
            | GlccError::NoSupervision
            | GlccError::Io { .. }
            | GlccError::Format { .. } => ErrorKind::Data,
            GlccError::Numerical(_) | GlccError::ObjectiveIncrease { .. } => ErrorKind::Numerical,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GlccError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        GlccError::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Prefixes the message with additional context, keeping the category.
    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            GlccError::Param(m) => GlccError::Param(format!("{ctx}: {m}")),
            GlccError::ConfigMismatch(m) => GlccError::ConfigMismatch(format!("{ctx}: {m}")),
            GlccError::Data(m) => GlccError::Data(format!("{ctx}: {m}")),
            GlccError::Numerical(m) => GlccError::Numerical(format!("{ctx}: {m}")),
            GlccError::NoSupervision => {
                GlccError::Data(format!("{ctx}: {}", GlccError::NoSupervision))
            }
            GlccError::ObjectiveIncrease { .. } => GlccError::Numerical(format!("{ctx}: {self}")),
            other => other,
        }
    }
}
