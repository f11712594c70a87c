//! Library surface of the CLI: the experiment file format and the command
//! implementations, reused by the binary and the end-to-end tests.

pub mod commands;
pub mod format;

/// Command-level errors carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Invariant(String),
    Reference(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Reference(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Invariant(m) | CliError::Reference(m) => m,
        }
    }
}
