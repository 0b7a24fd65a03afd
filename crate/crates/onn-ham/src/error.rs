use std::io;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pattern list is empty")]
    EmptyPatterns,
    #[error("pattern contains a non-finite value")]
    NonFiniteValue,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("output value {0} is not bipolar (-1 or +1)")]
    NonBipolarOutput(f64),
    #[error("activation {0} outside [-1, +1]")]
    ActivationOutOfRange(f64),
    #[error("gray level {0} out of range 0..=8")]
    LevelOutOfRange(i64),
    #[error("phase stage {0} out of range 0..=8")]
    StageOutOfRange(i64),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("image too small: {width}x{height}, need at least {min}x{min}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
    #[error("image is not quantized to 9 gray levels (max value {0})")]
    NotNineLevel(u8),
    #[error("image is not binary (expected levels 0 and 8 only)")]
    NotBinary,
    #[error("image is not 256-level (max value {0})")]
    Not256Level(u8),
    #[error("invalid image data: {0}")]
    InvalidImage(String),
    #[error("malformed PGM: {0}")]
    MalformedPgm(String),
    #[error("unsupported PGM depth: maxval {0} (limit 255)")]
    UnsupportedPgmDepth(u32),
    #[error("bad IDX magic 0x{0:08x} (expected 0x00000803)")]
    BadIdxMagic(u32),
    #[error("malformed IDX file: {0}")]
    MalformedIdx(String),
    #[error("evaluation map geometry does not fit: {0}")]
    EvalMapGeometry(String),
    #[error("reference map has no marked windows")]
    EmptyReference,
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
