use thiserror::Error;

use crate::circuit::Qubit;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gate references undeclared qubit {0}")]
    UndeclaredQubit(Qubit),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("invalid register: {0}")]
    InvalidRegister(String),
    #[error("circuit contains a measurement; {0} requires a measure-free circuit")]
    ContainsMeasure(&'static str),
    #[error("control qubit {0} is also acted on by the circuit")]
    ControlOverlap(Qubit),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix must be square with a power-of-two dimension >= 2, got {rows}x{cols}")]
    NotPowerOfTwo { rows: usize, cols: usize },
    #[error("simulation needs {requested} qubits, above the budget of {budget}")]
    QubitBudget { requested: usize, budget: usize },
    #[error("operand shapes differ: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("post-selection succeeded with probability {0:e}; no state survives")]
    Degenerate(f64),
    #[error("encoding is not Hermitian; {0} requires a Hermitian block-encoding")]
    NotHermitian(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("polynomial completion failed: {0}")]
    Completion(String),
    #[error("Krylov space is degenerate: every overlap eigenvalue is below {0:e}")]
    DegenerateKrylov(f64),
    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
