use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for order {n}")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("order {n} exceeds the supported maximum {max}")]
    OrderTooLarge { n: usize, max: usize },
    #[error("order {n} is below the required minimum {min}")]
    OrderTooSmall { n: usize, min: usize },
    #[error("order {n} outside {min}..={max}")]
    OrderOutOfRange { n: usize, min: usize, max: usize },
    #[error("graph has no edges")]
    NoEdges,
    #[error("normalization reference must be positive, got {0}")]
    BadReference(f64),
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("population edge strategy requires an atlas edge histogram")]
    MissingHistogram,
    #[error("length mismatch: {left} vs {right}")]
    ShapeError { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("bin count must be at least 2, got {0}")]
    BadBins(usize),
    #[error("no atlas available for order {0}")]
    MissingAtlas(usize),
    #[error("atlas build already in progress: {0}")]
    Locked(String),
    #[error("corrupt atlas: {0}")]
    CorruptAtlas(String),
    #[error("unknown statistic {0:?}")]
    UnknownStatistic(String),
    #[error("bad query: {0}")]
    BadQuery(String),
    #[error("graph6: {0}")]
    Codec(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Stable identifier used in JSON error payloads.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidVertex { .. } => "InvalidVertex",
            Error::SelfLoop(_) => "SelfLoop",
            Error::OrderTooLarge { .. } => "OrderTooLarge",
            Error::OrderTooSmall { .. } => "OrderTooSmall",
            Error::OrderOutOfRange { .. } => "OrderOutOfRange",
            Error::NoEdges => "NoEdges",
            Error::BadReference(_) => "BadReference",
            Error::BadParam(_) => "BadParam",
            Error::MissingHistogram => "MissingHistogram",
            Error::ShapeError { .. } => "ShapeError",
            Error::EmptyInput => "EmptyInput",
            Error::BadBins(_) => "BadBins",
            Error::MissingAtlas(_) => "MissingAtlas",
            Error::Locked(_) => "Locked",
            Error::CorruptAtlas(_) => "CorruptAtlas",
            Error::UnknownStatistic(_) => "UnknownStatistic",
            Error::BadQuery(_) => "BadQuery",
            Error::Codec(_) => "CodecError",
            Error::Csv(_) => "CsvError",
            Error::Json(_) => "JsonError",
            Error::Io(_) => "IoError",
        }
    }
}
