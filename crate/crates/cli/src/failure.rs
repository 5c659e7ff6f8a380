use robinpart::analysis::verify::Check;
use serde_json::{json, Value};
use thiserror::Error;

pub const EXIT_VERIFICATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

/// Everything that ends a run with a nonzero exit status.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("{message}")]
    Config {
        kind: &'static str,
        message: String,
        field: Option<String>,
    },
    #[error("{message}")]
    Numerical { kind: &'static str, message: String },
    #[error("{} of {total} checks failed", failed.len())]
    Verification { failed: Vec<Check>, total: usize },
}

impl Failure {
    pub fn missing(field: &str) -> Self {
        Failure::Config {
            kind: "MissingField",
            message: format!("missing required field `{field}`"),
            field: Some(field.into()),
        }
    }

    pub fn invalid(field: &str, message: impl Into<String>) -> Self {
        Failure::Config {
            kind: "InvalidParameter",
            message: message.into(),
            field: Some(field.into()),
        }
    }

    pub fn config(kind: &'static str, message: impl Into<String>) -> Self {
        Failure::Config {
            kind,
            message: message.into(),
            field: None,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config { .. } => EXIT_CONFIG,
            Failure::Numerical { .. } => EXIT_NUMERICAL,
            Failure::Verification { .. } => EXIT_VERIFICATION,
        }
    }

    /// Structured form written to stderr.
    pub fn to_json(&self) -> Value {
        match self {
            Failure::Config { kind, message, field } => json!({ "kind": kind, "message": message, "field": field }),
            Failure::Numerical { kind, message } => json!({ "kind": kind, "message": message, "field": null }),
            Failure::Verification { failed, .. } => json!({
                "kind": "VerificationFailed",
                "message": self.to_string(),
                "field": null,
                "failed": failed,
            }),
        }
    }
}

impl From<robinpart::Error> for Failure {
    fn from(e: robinpart::Error) -> Self {
        let message = e.to_string();
        if !e.is_config_error() {
            return Failure::Numerical { kind: e.kind(), message };
        }
        let field = match &e {
            robinpart::Error::InvalidParameter { name, .. } => Some((*name).to_string()),
            robinpart::Error::NonPositiveBeta(_) => Some("beta".into()),
            robinpart::Error::NonPositiveSpacing(_) | robinpart::Error::SpacingTooCoarse { .. } => Some("h".into()),
            robinpart::Error::TooManyPhases { .. } => Some("k".into()),
            robinpart::Error::NotConvex | robinpart::Error::SelfIntersectingPolygon => Some("polygon".into()),
            _ => None,
        };
        Failure::Config {
            kind: e.kind(),
            message,
            field,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::config("Io", e.to_string())
    }
}
