//! CLI errors with their stable exit codes: 0 success, 2 parse/schema,
//! 3 domain, 4 verdict failure, 5 calibration failure, 1 anything else.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {message}")]
    UnreadableInput { path: String, message: String },

    #[error("{message}{}", hint.as_ref().map(|h| format!(" (hint: {h})")).unwrap_or_default())]
    Domain {
        message: String,
        hint: Option<String>,
    },

    #[error("{failed} of {total} verdicts failed; see {verdicts_path}")]
    VerdictFailed {
        failed: usize,
        total: usize,
        verdicts_path: String,
    },

    #[error("calibration failed: {message}")]
    Calibration { message: String },

    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Config { .. } | CliError::UnreadableInput { .. } => {
                2
            }
            CliError::Domain { .. } => 3,
            CliError::VerdictFailed { .. } => 4,
            CliError::Calibration { .. } => 5,
            CliError::Internal(_) => 1,
        }
    }
}

/// Maps a computation-stage core error to the CLI contract. Data-dependent
/// conditions are domain errors (exit 3) with a remediation hint; solver
/// failures are internal.
pub fn domain_error(err: covest_core::Error) -> CliError {
    use covest_core::Error as E;
    let hint = match &err {
        E::EmptyMask => Some(
            "every entry of the input is missing; check the mask or the missing-token spelling"
                .to_string(),
        ),
        E::NegativeTrace { .. } => Some(
            "collect more samples, or pass a fixed --lambda instead of the data-driven rule"
                .to_string(),
        ),
        E::InvalidDelta { .. } => Some("delta must lie in (0, 1]".to_string()),
        E::NotPsd { .. } => {
            Some("the covariance in the config must be positive semidefinite".to_string())
        }
        _ => None,
    };
    match err {
        E::NoConvergence { .. } | E::PgdNoConvergence { .. } | E::PgdObjectiveIncrease { .. } => {
            CliError::Internal(err.to_string())
        }
        _ => CliError::Domain {
            message: err.to_string(),
            hint,
        },
    }
}
