use std::fmt;

use ultraslow_core::Error;

/// Process exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self { code: EXIT_NUMERICAL, message: message.into() }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Self::usage(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Input problems (bad arguments, contracts, parse errors) are usage errors;
/// breakdowns of the numerics are numerical failures.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Contract(_) | Error::Parse { .. } => Self::usage(e.to_string()),
            Error::Evaluation { .. } | Error::Invariant(_) | Error::Numerical(_) => Self::numerical(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_exit_codes() {
        assert_eq!(CliError::from(Error::Contract("x".into())).code, EXIT_USAGE);
        assert_eq!(CliError::from(Error::Parse { line: 3, message: "x".into() }).code, EXIT_USAGE);
        assert_eq!(CliError::from(Error::Domain("x".into())).code, EXIT_USAGE);
        assert_eq!(CliError::from(Error::Numerical("x".into())).code, EXIT_NUMERICAL);
        assert_eq!(CliError::from(Error::Invariant("x".into())).code, EXIT_NUMERICAL);
    }
}
