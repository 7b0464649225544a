use thiserror::Error;

/// Everything that can go wrong in a decomposition.
///
/// Precondition violations carry the measured defect so callers can report
/// how far the input was from being admissible.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: {left_rows}x{left_cols} against {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("odd dimension {0}")]
    OddDimension(usize),

    #[error("matrix is not symmetric (relative defect {defect:e})")]
    NotSymmetric { defect: f64 },

    #[error("matrix is not skew-symmetric (relative defect {defect:e})")]
    NotSkew { defect: f64 },

    #[error("matrix is not normal (relative commutator {defect:e})")]
    NotNormal { defect: f64 },

    #[error("matrix is not strictly positive (min eigenvalue {min_eig:e}, threshold {threshold:e})")]
    NotPositive { min_eig: f64, threshold: f64 },

    #[error("matrix is singular (smallest singular value {sigma_min:e}, threshold {threshold:e})")]
    Singular { sigma_min: f64, threshold: f64 },

    #[error("skew-symmetric matrix has a kernel of dimension {0}")]
    NonzeroKernel(usize),

    #[error("Jacobi iteration did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("eigenspace pairing breakdown: {0}")]
    PairingBreakdown(String),

    #[error("Krylov basis breakdown: {0}")]
    KrylovBreakdown(String),

    #[error("zero starting vector")]
    ZeroVector,

    #[error("moment exponents {t1}+{t2} exceed the bound {max}")]
    ExponentBound { t1: usize, t2: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
