use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not skew-symmetric (relative defect {0:.3e})")]
    NotSkewSymmetric(f64),
    #[error("matrix is not symmetric (relative defect {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix has odd dimension {0}")]
    OddDimension(usize),
    #[error("matrix is numerically singular")]
    Singular,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("polynomial is not a perfect square (relative residual {0:.3e})")]
    NotASquare(f64),
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("transfer function is singular at sample s = {0}")]
    SingularAtSample(num_complex::Complex<f64>),
    #[error("realizations are not equivalent (residual {0:.3e})")]
    NotEquivalent(f64),
    #[error("realization is not minimal")]
    NotMinimal,
    #[error("symmetry mismatch: {0}")]
    SymmetryMismatch(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("state dimension {n} must be even for the {kind} type")]
    ParityError { kind: String, n: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("system is not strictly proper (D != 0)")]
    NotStrictlyProper,
    #[error("no start converged ({starts} starts)")]
    NoConvergence { starts: usize },
    #[error("closed-loop structure violated: {0}")]
    StructureViolated(String),
    #[error("d_m evaluation produced a non-integral value for m = {0}")]
    InternalNonIntegral(usize),
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("format error: {0}")]
    Format(String),
}
