//! File formats and command implementations behind the `foxh` binary.

pub mod doc;
pub mod grid;
pub mod run;

pub use run::{run, Request, Verb};

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("acceptance failure: {0}")]
    Acceptance(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Eval(_) => 4,
            CliError::Acceptance(_) => 5,
        }
    }
}

impl From<foxh_core::Error> for CliError {
    fn from(e: foxh_core::Error) -> Self {
        let text = one_line(&e.to_string());
        if e.is_validation() {
            CliError::Validation(text)
        } else {
            CliError::Eval(text)
        }
    }
}

/// Collapses a message onto one line.
pub fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
