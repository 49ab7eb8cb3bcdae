use std::fmt;
use std::io;
use std::path::PathBuf;

#[derive(Debug)]
pub enum SimError {
    /// Unreadable config text, unknown or missing keys, bad values.
    Config(String),
    /// A physics model rejected its parameters.
    Domain(iontrap_core::Error),
    Io { path: PathBuf, source: io::Error },
    /// Two run directories cannot be compared.
    Schema(String),
}

impl SimError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) | SimError::Schema(_) => 2,
            SimError::Domain(_) => 3,
            SimError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        SimError::Io { path: path.into(), source }
    }
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Config(msg) => write!(f, "config error: {msg}"),
            SimError::Domain(e) => write!(f, "{e}"),
            SimError::Io { path, source } => write!(f, "I/O error on {}: {source}", path.display()),
            SimError::Schema(msg) => write!(f, "schema mismatch: {msg}"),
        }
    }
}

impl std::error::Error for SimError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SimError::Domain(e) => Some(e),
            SimError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<iontrap_core::Error> for SimError {
    fn from(e: iontrap_core::Error) -> Self {
        SimError::Domain(e)
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
