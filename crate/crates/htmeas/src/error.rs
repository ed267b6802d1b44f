use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Pauli character {ch:?} at position {pos}")]
    BadPauliChar { ch: char, pos: usize },
    #[error("expected {expected} qubits, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("matrix is singular over GF(2)")]
    SingularMatrix,
    #[error("operators {0} and {1} do not commute")]
    NonCommuting(String, String),
    #[error("phase i^{0} of a conjugated Hermitian operator is not real")]
    NonRealPhase(u8),
    #[error("operator {0} is not diagonalized by this circuit")]
    NotDiagonalized(String),
    #[error("graph error: {0}")]
    Graph(String),
    #[error("{0}")]
    Limit(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
