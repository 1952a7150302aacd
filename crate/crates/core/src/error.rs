use std::io;

use thiserror::Error;

/// Errors produced anywhere in the codec pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed PLY header: {0}")]
    MalformedHeader(String),

    #[error("PLY is missing color property `{0}`")]
    MissingColor(&'static str),

    #[error("PLY is missing position property `{0}`")]
    MissingPosition(&'static str),

    #[error("unsupported PLY format `{0}` (only ascii and binary_little_endian)")]
    UnsupportedFormat(String),

    #[error("PLY body holds fewer vertices than declared ({found} of {expected})")]
    CountMismatch { expected: usize, found: usize },

    #[error("bad PLY value on vertex {vertex}: {reason}")]
    BadValue { vertex: usize, reason: String },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("invalid block schedule: {0}")]
    InvalidSchedule(String),

    #[error("level {level} out of range (tree has {levels} block levels)")]
    LevelOutOfRange { level: usize, levels: usize },

    #[error("node weight {weight} at index {index} is not strictly positive")]
    NonPositiveWeight { index: usize, weight: f64 },

    #[error("eigensolver failed on block {block} of level {level}")]
    Eigensolver { level: usize, block: usize },

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("bitstream header error: {0}")]
    Header(String),

    #[error("truncated entropy-coded stream")]
    Truncated,

    #[error("quantized value {0} does not fit the symbol range")]
    SymbolOverflow(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
