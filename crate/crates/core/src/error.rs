use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    DimensionMismatch { expected: usize, found: usize },
    IndexOutOfRange { index: usize, len: usize },
    NotSquare { rows: usize, cols: usize },
    NotHermitian { defect: f64 },
    NotUnitary { defect: f64 },
    NotNormalized { what: &'static str, value: f64 },
    NotPositive { min_eigenvalue: f64 },
    NotOrthonormal { defect: f64 },
    DuplicateEigenvalue { value: f64 },
    NegativeProbability { outcome: usize, value: f64 },
    ZeroProbability { outcome: usize, value: f64 },
    InvalidParameter { name: &'static str, value: f64 },
    Singular,
    NoConvergence { what: &'static str },
    Divergence { iteration: usize, residual: f64 },
    InsufficientCoverage { tail_mass: f64 },
    RefinementMismatch { deviation: f64 },
    DomainViolation { what: &'static str, value: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Error::NotHermitian { defect } => write!(f, "matrix is not Hermitian (defect {defect:e})"),
            Error::NotUnitary { defect } => write!(f, "matrix is not unitary (defect {defect:e})"),
            Error::NotNormalized { what, value } => write!(f, "{what} is not normalized (value {value})"),
            Error::NotPositive { min_eigenvalue } => {
                write!(f, "matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")
            }
            Error::NotOrthonormal { defect } => {
                write!(f, "vectors are not orthonormal (defect {defect:e})")
            }
            Error::DuplicateEigenvalue { value } => write!(f, "eigenvalue {value} appears more than once"),
            Error::NegativeProbability { outcome, value } => {
                write!(f, "outcome {outcome} has negative probability {value:e}")
            }
            Error::ZeroProbability { outcome, value } => {
                write!(f, "outcome {outcome} has zero probability ({value:e})")
            }
            Error::InvalidParameter { name, value } => write!(f, "invalid parameter {name} = {value}"),
            Error::Singular => write!(f, "singular linear system"),
            Error::NoConvergence { what } => write!(f, "{what} did not converge"),
            Error::Divergence { iteration, residual } => {
                write!(f, "iteration diverged at step {iteration} (residual {residual:e})")
            }
            Error::InsufficientCoverage { tail_mass } => {
                write!(f, "grid does not cover the state (tail mass {tail_mass:e})")
            }
            Error::RefinementMismatch { deviation } => {
                write!(f, "successive refinements disagree by {deviation:e}; increase N")
            }
            Error::DomainViolation { what, value } => write!(f, "{what} out of domain ({value})"),
        }
    }
}

impl core::error::Error for Error {}
