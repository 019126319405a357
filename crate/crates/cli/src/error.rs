use std::path::PathBuf;

use pinsker_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("{path}: {reason}")]
    Input { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("numerical failure: {0}")]
    Numeric(CoreError),
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Numeric(_) => 3,
            _ => 2,
        }
    }
}

fn is_configuration(e: &CoreError) -> bool {
    match e {
        CoreError::InvalidParameter { .. }
        | CoreError::InvalidSampleCount(_)
        | CoreError::GridTooLarge { .. }
        | CoreError::TooFewCoefficients { .. }
        | CoreError::InfeasibleBudget { .. }
        | CoreError::EmptyDesign { .. } => true,
        CoreError::Replication { source, .. } => is_configuration(source),
        _ => false,
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if !is_configuration(&e) {
            return Self::Numeric(e);
        }
        match e {
            CoreError::InvalidParameter { name, reason } => Self::config(name, reason),
            CoreError::InvalidSampleCount(_) | CoreError::TooFewCoefficients { .. } => {
                Self::config("run.ns", e.to_string())
            }
            CoreError::GridTooLarge { .. } => Self::config("run.ns", e.to_string()),
            other => Self::config("lowerbound", other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let cfg: CliError = CoreError::InvalidParameter {
            name: "model.r",
            reason: "bad".into(),
        }
        .into();
        assert_eq!(cfg.exit_code(), 2);
        assert!(cfg.to_string().contains("model.r"));
        let num: CliError = CoreError::NonFinite(4).into();
        assert_eq!(num.exit_code(), 3);
        let nested: CliError = CoreError::Replication {
            replication: 1,
            source: Box::new(CoreError::NonFinite(2)),
        }
        .into();
        assert_eq!(nested.exit_code(), 3);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
    }
}
