use std::fmt;

/// Errors shared across the laboratory modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(String),
    /// A fit or statistic was requested from too few data points.
    InsufficientData(String),
    /// Vector or matrix dimensions do not agree.
    DimensionMismatch { expected: usize, got: usize },
    /// A matrix failed the symplectic test `M^T J M = J`.
    NonSymplectic { defect: f64 },
    /// The holomorphic block `P` is numerically singular.
    NearSingularBlock { det_abs: f64 },
    /// A fitted normalization constant is inconsistent across the test grid.
    NormalizationInconsistency(String),
    /// A point sits too close to a spherical-coordinate chart degeneracy.
    ChartDegenerate { sin_abs: f64 },
    /// No usable Heisenberg frame vector could be constructed.
    FrameConstruction(String),
    /// A quadrature rule is under-resolved for the requested quantity.
    ResolutionError(String),
    /// Two supposedly identical internal computations disagree.
    InternalConsistency(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NonSymplectic { defect } => {
                write!(f, "matrix is not symplectic (defect {defect:.3e})")
            }
            Error::NearSingularBlock { det_abs } => {
                write!(f, "holomorphic block is near singular (|det P| = {det_abs:.3e})")
            }
            Error::NormalizationInconsistency(msg) => {
                write!(f, "normalization inconsistency: {msg}")
            }
            Error::ChartDegenerate { sin_abs } => {
                write!(f, "coordinate chart degenerate (|sin Phi| = {sin_abs:.3e})")
            }
            Error::FrameConstruction(msg) => write!(f, "frame construction failed: {msg}"),
            Error::ResolutionError(msg) => write!(f, "under-resolved quadrature: {msg}"),
            Error::InternalConsistency(msg) => write!(f, "internal consistency failure: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
