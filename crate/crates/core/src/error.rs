use alloc::string::String;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (relative anti-Hermitian norm {0:.3e})")]
    NotHermitian(f64),
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("measurement set is empty")]
    EmptySet,
    #[error("duplicate measurement label {0}")]
    DuplicateLabel(String),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("expected {expected} hidden states, got {got}")]
    CountMismatch { expected: usize, got: usize },
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("negative evolution time {0}")]
    NegativeTime(f64),
    #[error("bad channel parameter: {0}")]
    BadParameter(String),
    #[error("decay rate is singular: G(t) vanishes at t = {0}")]
    SingularAtZeroOfG(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("dual certificate rejected: {0}")]
    CertificateInvalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
