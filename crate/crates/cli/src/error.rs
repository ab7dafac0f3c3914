use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("invalid JSON in {0}: {1}")]
    Json(String, #[source] serde_json::Error),
    #[error(transparent)]
    Math(#[from] bidisk_core::Error),
}

impl CliError {
    /// 2 for mathematical failures, 1 for configuration and I/O problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Math(bidisk_core::Error::NotDivisible(_)) => 2,
            _ => 1,
        }
    }

    /// Machine-readable form written in place of a report.
    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            CliError::Config(_) => "config",
            CliError::Io(..) => "io",
            CliError::Json(..) => "json",
            CliError::Math(bidisk_core::Error::NotDivisible(_)) => "not_divisible",
            CliError::Math(_) => "math",
        };
        serde_json::json!({ "error": { "kind": kind, "message": self.to_string() } })
    }
}
