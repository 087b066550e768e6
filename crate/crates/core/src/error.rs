use thiserror::Error;

use crate::qasm::ParseDiagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("digit {digit} of qudit {qudit} is out of range for dimension {dim}")]
    DigitOutOfRange { qudit: usize, digit: usize, dim: usize },

    #[error("invalid dimension list: {0}")]
    InvalidDims(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qudit line {line} out of range for a circuit with {count} qudits")]
    LineOutOfRange { line: usize, count: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("total dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("total dimension overflows the address space")]
    DimensionOverflow,

    #[error("circuit contains measurements; a unitary is undefined")]
    MeasurementPresent,

    #[error("state is not normalized (norm^2 = {norm_sq})")]
    Unnormalized { norm_sq: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid noise model: {0}")]
    Noise(String),

    #[error("invalid device: {0}")]
    Device(String),

    #[error("compilation failed: {0}")]
    Compile(String),

    #[error("{} parse error(s); first: {}", .0.len(), .0.first().map(|d| d.to_string()).unwrap_or_default())]
    Parse(Vec<ParseDiagnostic>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
