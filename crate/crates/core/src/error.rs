use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qudit dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u32, right: u32 },

    #[error("unsupported qudit dimension {0}: must be an odd prime")]
    InvalidDimension(u32),

    #[error("parse error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, msg: String },

    #[error("lattice {rows}x{cols} is too small (need at least 3x3)")]
    LatticeTooSmall { rows: usize, cols: usize },

    #[error("invalid lattice operation: {0}")]
    Lattice(String),

    #[error("qutrit index {index} out of range for {n} qudits")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("gate targets must be distinct")]
    RepeatedTarget,

    #[error("gate arity {arity} does not match {targets} targets")]
    ArityMismatch { arity: usize, targets: usize },

    #[error("state vector with {n} qudits exceeds the dense cap of {cap}; use the tableau backend")]
    CapacityExceeded { n: usize, cap: usize },

    #[error("post-selection on a zero-probability branch (p = {probability:e})")]
    ZeroProbability { probability: f64 },

    #[error("gate '{0}' is not Clifford: a Pauli image is not a Pauli operator")]
    NotClifford(String),

    #[error("gate '{name}' failed a consistency check: {msg}")]
    GateConsistency { name: String, msg: String },

    #[error("prep circuit synthesis failed: {0}")]
    Synthesis(String),

    #[error("post-selection retry cap of {cap} attempts exhausted")]
    RetryExhausted { cap: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse { line: None, msg: msg.into() }
    }

    pub(crate) fn parse_at(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line: Some(line), msg: msg.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
