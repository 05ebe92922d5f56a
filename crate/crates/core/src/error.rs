use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {reason}")]
    Malformed {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{0}: no triples found")]
    EmptyFile(PathBuf),

    #[error("rule file references unknown relations: {}", .0.join(", "))]
    UnknownRelations(Vec<String>),

    #[error("path edge ({subject}, {relation}) has no successors in the index")]
    Inconsistent { subject: u32, relation: u32 },

    #[error("brute-force oracle refuses graphs with {entities} entities (limit {limit})")]
    OracleGuard { entities: usize, limit: usize },

    #[error("test set is empty")]
    EmptyTestSet,

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
