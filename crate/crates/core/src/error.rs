use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid size {0} must be even and at least 4")]
    InvalidGrid(usize),
    #[error("coefficients are not Hermitian: defect {defect:.3e} exceeds {tol:.1e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("coefficient array has length {got}, grid needs {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("kernel is singular at the origin")]
    SingularPoint,
    #[error("non-finite value at step {step} (t = {t:.4}): {what}")]
    NumericAbort { step: usize, t: f64, what: String },
    #[error("matrix is not positive semidefinite")]
    NotPositiveSemidefinite,
}

pub type Result<T> = std::result::Result<T, Error>;
