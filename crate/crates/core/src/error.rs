use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in vector or matrix")]
    NonFinite,

    #[error("matrix is singular or not positive definite (pivot {pivot} = {value:e})")]
    SingularMatrix { pivot: usize, value: f64 },

    #[error("{receivers} receivers cannot be inverted with {antennas} transmit antennas")]
    InsufficientAntennas { receivers: usize, antennas: usize },

    #[error("insufficient degrees of freedom: {antennas} antennas for {constrained} constrained users")]
    InsufficientDoF { antennas: usize, constrained: usize },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("interference detector received no samples")]
    NoSamples,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid CSI: {0}")]
    InvalidCsi(String),

    #[error("inconsistent slot state: {0}")]
    Inconsistent(String),

    #[error("primary transmitter is not transmitting in this slot")]
    NotTransmitting,

    #[error("fairness index is undefined: {0}")]
    Undefined(&'static str),

    #[error("slot {slot}, {phase}: {source}")]
    Slot {
        slot: u64,
        phase: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("config `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed results file: {0}")]
    Malformed(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { field: field.into(), reason: reason.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn at_slot(self, slot: u64, phase: &'static str) -> Self {
        Error::Slot { slot, phase, source: Box::new(self) }
    }
}
