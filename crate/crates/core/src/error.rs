use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which input file a parse error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Edges,
    Attributes,
    Labels,
    Embedding,
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Source::Edges => "edge list",
            Source::Attributes => "attribute file",
            Source::Labels => "label file",
            Source::Embedding => "embedding file",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_kind} line {line}: {message}")]
    Parse {
        source_kind: Source,
        line: usize,
        message: String,
    },

    #[error("{source_kind} line {line}: unknown node id `{id}`")]
    UnknownNode {
        source_kind: Source,
        line: usize,
        id: String,
    },

    #[error("edge list line {line}: negative weight {weight}")]
    NegativeWeight { line: usize, weight: f64 },

    #[error("attribute file has no row for node `{0}`")]
    MissingAttributes(String),

    #[error("operation requires node attributes but the graph has none")]
    NoAttributes,

    #[error("operation requires node labels but the graph has none")]
    NoLabels,

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("noise distribution is empty (no positive weights)")]
    EmptyNoise,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite loss at epoch {epoch}, batch {batch} (source node {node})")]
    NonFiniteLoss { epoch: usize, batch: usize, node: usize },

    #[error("could not sample {wanted} non-edges after {attempts} attempts")]
    NonEdgeSampling { wanted: usize, attempts: usize },

    #[error("score list `{0}` is empty")]
    EmptyScores(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(source_kind: Source, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_kind,
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerical pipeline rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_) | Error::NonFiniteLoss { .. } | Error::EmptyNoise
        )
    }

    /// True for configuration errors detectable before any compute.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::InvalidConfig(_) | Error::NoAttributes | Error::NoLabels)
    }
}
