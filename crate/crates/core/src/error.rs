use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("register `{0}` has dimension zero")]
    ZeroDimension(String),
    #[error("register `{0}` declared twice")]
    DuplicateRegister(String),
    #[error("register `{0}` is not part of the layout")]
    UnknownRegister(String),
    #[error("layout dimension overflows the supported maximum")]
    LayoutTooLarge,
    #[error("register `{register}` has dimension {actual}, expected {expected}")]
    DimensionMismatch {
        register: String,
        expected: usize,
        actual: usize,
    },
    #[error("register `{register}` must be a qubit, found dimension {dim}")]
    NotAQubit { register: String, dim: usize },
    #[error("register `{0}` is both controlled on and acted upon")]
    ControlOverlapsTarget(String),
    #[error("amplitude vector has length {actual}, layout needs {expected}")]
    AmplitudeLength { expected: usize, actual: usize },
    #[error("operator is not norm preserving: {0}")]
    NotUnitary(String),
    #[error("dense matrix of dimension {dim} exceeds the cap {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },
    #[error("measurement conditioned on a zero-norm block")]
    DegenerateMeasurement,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("sample spaces differ: {0}")]
    SampleSpaceMismatch(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}
