use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    NotFound(PathBuf),

    #[error("unsupported WAV format: {0}")]
    UnsupportedFormat(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid audio: {0}")]
    InvalidAudio(String),

    #[error("invalid synthesis spec: {field}: {reason}")]
    InvalidSpec { field: String, reason: String },

    #[error("signal has zero energy; SNR is undefined")]
    ZeroSignal,

    #[error("invalid frame parameters: {0}")]
    InvalidFrameParams(String),

    #[error("signal too short: {samples} samples, need at least {needed}")]
    SignalTooShort { samples: usize, needed: usize },

    #[error("frame length {0} is not a power of two")]
    NonPowerOfTwoLength(usize),

    #[error("order {order} must be smaller than frame length {len}")]
    OrderTooLarge { order: usize, len: usize },

    #[error("Levinson-Durbin breakdown at step {step}: |k| = {reflection}")]
    NumericalBreakdown { step: usize, reflection: f64 },

    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("zero vector has no pseudoinverse")]
    ZeroVector,

    #[error("frame {t} outside valid range [{lo}, {hi}]")]
    IndexOutOfValidRange { t: usize, lo: usize, hi: isize },

    #[error("empty input")]
    EmptyInput,

    #[error("{frames} frames is too few for context half-width {context} (need {needed})")]
    TooFewFrames {
        frames: usize,
        context: usize,
        needed: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("thresholds must be strictly descending and within (0, 1]: {0:?}")]
    NonDescendingThresholds(Vec<f64>),
}
