use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A positional or count argument fell outside its admissible range.
    #[error("{what} out of range: {value} (expected {expected})")]
    Range {
        what: &'static str,
        value: u64,
        expected: String,
    },

    /// An input violated a mathematical precondition.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("statistic undefined: {0}")]
    Undefined(&'static str),

    /// An edge handed to a metric is not part of the graph it is evaluated on.
    #[error("edge ({i}, {j}) is not present in the snapshot graph")]
    MissingEdge { i: u32, j: u32 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: {msg}")]
    Validation { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Every vertex of the computational graph expired; generation cannot
    /// continue without reseeding from the initial graph.
    #[error("generator starved: the computational graph has no edges left (reseed from G0)")]
    Starved,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn range(what: &'static str, value: u64, expected: impl Into<String>) -> Self {
        Error::Range {
            what,
            value,
            expected: expected.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the environment rather than by the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
