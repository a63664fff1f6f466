use serde::Serialize;

/// A runtime failure, reported as one JSON line on stderr.
#[derive(Debug, Clone, PartialEq, Serialize, thiserror::Error)]
#[error("{kind}: {message}")]
pub struct CliError {
    /// `io`, `config`, `data`, `model` or `fit`.
    pub kind: &'static str,
    pub message: String,
    /// Offending config key, CSV column or argument, when there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
}

impl CliError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into(), key: None }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new("io", message)
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new("config", message)
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self::new("data", message)
    }

    pub fn with_key(mut self, key: impl Into<String>) -> Self {
        self.key = Some(key.into());
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&ErrorLine { error: self }).expect("error serializes")
    }
}

#[derive(Serialize)]
struct ErrorLine<'a> {
    error: &'a CliError,
}

impl From<pairspin::Error> for CliError {
    fn from(e: pairspin::Error) -> Self {
        let kind = match e {
            pairspin::Error::Fit(_) => "fit",
            _ => "model",
        };
        Self::new(kind, e.to_string())
    }
}
