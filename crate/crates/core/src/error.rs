use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading manifests or audio.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest header: {0}")]
    Header(String),
    #[error("manifest row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("usage: {0}")]
    Usage(String),
}

/// Errors from the acoustic front end.
#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("front-end configuration: {0}")]
    Config(String),
    #[error("audio ingestion ({path}): {message}")]
    Ingestion { path: String, message: String },
}

/// Misuse of distance or metric primitives.
#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("empty sequence")]
    EmptySequence,
    #[error("categories overlap at token index {0}")]
    Overlap(usize),
    #[error("no triplets: both categories are singletons")]
    NoTriplets,
    #[error("empty category")]
    EmptyCategory,
    #[error("empty result: {0}")]
    EmptyResult(String),
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("sample {index}: {source}")]
    Sample {
        index: usize,
        #[source]
        source: Box<MetricError>,
    },
}

/// Errors from the paired statistics.
#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 paired observations, got {0}")]
    TooFew(usize),
    #[error("degenerate input: differences have zero variance")]
    ZeroVariance,
    #[error("zero baseline")]
    ZeroBaseline,
}

/// Top-level error for experiment runs. Each variant maps to a process exit code.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("output {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Feature(FeatureError::Config(_)) => 2,
            RunError::Corpus(CorpusError::Usage(_)) => 2,
            RunError::Corpus(_) | RunError::Feature(_) => 3,
            RunError::Insufficient(_) => 4,
            RunError::Metric(_) | RunError::Output { .. } => 1,
        }
    }
}
