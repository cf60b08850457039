use cdgsk_core::bloch::BlochError;
use cdgsk_core::evolve::EvolveError;
use cdgsk_core::profile::ProfileError;
use cdgsk_core::reduced::ReducedError;
use serde_json::json;

/// Exit status for invalid input.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status for solver or I/O failure.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) | CliError::Io { .. } => EXIT_NUMERICAL,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Numerical(_) => "numerical",
            CliError::Io { .. } => "io",
        }
    }

    /// `{"error": {"kind", "message", "exit_code"}}`.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::NonConvergence { .. } | ProfileError::SingularJacobian { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<BlochError> for CliError {
    fn from(e: BlochError) -> Self {
        match e {
            BlochError::Tangent(p) => p.into(),
            BlochError::Eigen { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ReducedError> for CliError {
    fn from(e: ReducedError) -> Self {
        match e {
            ReducedError::Bloch(b) => b.into(),
            ReducedError::Profile(p) => p.into(),
            ReducedError::WrongRank { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<EvolveError> for CliError {
    fn from(e: EvolveError) -> Self {
        match e {
            EvolveError::BlowUp { .. } | EvolveError::Fourier(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}
