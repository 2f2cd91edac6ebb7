use std::path::PathBuf;

/// Errors produced anywhere in the simulation and analysis pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{quantity} = {value} outside valid range [{min}, {max}]")]
    Domain {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("format error in {source_name} at byte {offset}: {message}")]
    TagFormat {
        source_name: String,
        offset: u64,
        message: String,
    },

    #[error("format error in {source_name} at line {line}: {message}")]
    TableFormat {
        source_name: String,
        line: u64,
        message: String,
    },

    #[error("fit did not converge after {iterations} iterations (last parameters {last:?})")]
    NoConvergence { iterations: usize, last: Vec<f64> },

    #[error("no dip detected: {0}")]
    NoDip(String),

    #[error("degenerate calibration: {0}")]
    Degenerate(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
