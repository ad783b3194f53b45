use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    MalformedRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{kind} {id:?} referenced by {referrer:?} does not exist")]
    DanglingReference {
        kind: &'static str,
        id: String,
        referrer: String,
    },

    #[error("duplicate {kind} identifier {id:?}")]
    DuplicateId { kind: &'static str, id: String },

    #[error("corpus has no comments")]
    EmptyCorpus,

    #[error("requested {requested} media but the corpus has only {available}")]
    TooFewMedia { requested: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("sympathy ratio undefined for a comment with no sympathies or antipathies")]
    ZeroDenominator,

    #[error("no qualifying pair of anticorrelated media clusters (corpus looks unpolarized)")]
    NoQualifyingPair,

    #[error("user {0:?} has no comments on group media")]
    NoQualifyingComments(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("correlation undefined: {0} input is constant")]
    ConstantInput(&'static str),

    #[error("need at least {needed} occupied bins, found {found}")]
    TooFewBins { needed: usize, found: usize },

    #[error("article {0:?} does not belong to a media group")]
    NotGroupArticle(String),

    #[error("training diverged at step {step}: loss = {loss}")]
    Divergence { step: usize, loss: f64 },

    #[error("model container: {0}")]
    ModelFormat(String),

    #[error("id sets are disjoint: {0}")]
    DisjointIds(&'static str),

    #[error("missing table {0}")]
    MissingTable(String),

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

/// Coarse error families, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Io,
    Data,
    Config,
    Unpolarized,
    Numerical,
    Analysis,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. } | Error::MissingTable(_) => ErrorClass::Io,
            Error::MalformedRecord { .. }
            | Error::DanglingReference { .. }
            | Error::DuplicateId { .. }
            | Error::EmptyCorpus
            | Error::ModelFormat(_) => ErrorClass::Data,
            Error::InvalidConfig(_) | Error::InvalidArgument(_) => ErrorClass::Config,
            Error::NoQualifyingPair => ErrorClass::Unpolarized,
            Error::Divergence { .. } => ErrorClass::Numerical,
            Error::Stage { source, .. } => source.class(),
            _ => ErrorClass::Analysis,
        }
    }
}
