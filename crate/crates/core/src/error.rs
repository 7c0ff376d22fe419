use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("symbol environment mismatch: {0}")]
    Environment(String),
    #[error("cannot differentiate opaque atom {atom} along x{var}")]
    UnsupportedDerivative { atom: String, var: usize },
    #[error("unsupported substitution: {0}")]
    UnsupportedSubstitution(String),
    #[error("denominator vanishes under substitution: {0}")]
    SingularSubstitution(String),
    #[error("closed-form matrix exponential unavailable: {0}")]
    ClosedFormUnavailable(String),
    #[error("degenerate subalgebra family: {0}")]
    DegenerateFamily(String),
    #[error("not a subalgebra: {0}")]
    NotSubalgebra(String),
    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: {msg}")]
    Semantic { line: usize, msg: String },
    #[error("verification failed: {0}")]
    Verification(String),
}
