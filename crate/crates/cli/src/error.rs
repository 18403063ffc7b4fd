use std::process::ExitCode;

use netmon::edgelist::EdgeListError;
use netmon::scenario::ScenarioError;
use netmon::stats::CsvError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag combinations.
    Usage(String),
    /// An input file that does not parse or violates its schema.
    Schema(String),
    /// Missing files, I/O failures and computation errors.
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Schema(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Schema(_) => "schema",
            CliError::Runtime(_) => "runtime",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Schema(m) | CliError::Runtime(m) => m,
        }
    }

    /// Writes the error to stderr as one JSON object and returns its exit code.
    pub fn report(&self) -> ExitCode {
        let body = serde_json::json!({
            "error": self.kind(),
            "code": self.code(),
            "message": self.message().trim_end(),
        });
        eprintln!("{body}");
        ExitCode::from(self.code())
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Runtime(format!("{}: {e}", path.display()))
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Io(_) | ScenarioError::Calibration { .. } => CliError::Runtime(e.to_string()),
            ScenarioError::Parse(_) | ScenarioError::Invalid { .. } | ScenarioError::MissingCell { .. } => {
                CliError::Schema(e.to_string())
            }
        }
    }
}

impl From<EdgeListError> for CliError {
    fn from(e: EdgeListError) -> Self {
        match e {
            EdgeListError::Io(_) => CliError::Runtime(e.to_string()),
            other => CliError::Schema(other.to_string()),
        }
    }
}

impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        CliError::Schema(e.to_string())
    }
}
