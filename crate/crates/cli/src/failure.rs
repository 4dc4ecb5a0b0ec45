use std::fmt;
use std::path::Path;

use balset_core::Error;

/// Everything that ends a command early, keyed by its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Invalid(String),
    /// Exit 3.
    Io(String),
    /// Exit 4.
    Refused(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Io(_) => 3,
            Failure::Refused(_) => 4,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Failure::Io(format!("{}: {err}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SizeRefused(_) => Failure::Refused(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "invalid input: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Refused(m) => write!(f, "{m}"),
        }
    }
}
