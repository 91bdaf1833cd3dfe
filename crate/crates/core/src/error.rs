use crate::grid::CellId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cell {0} is already at the finest level")]
    LevelOverflow(CellId),

    #[error("cell {0} lies outside the domain")]
    OutOfDomain(CellId),

    #[error("grading violation: stencil member {0} cannot be resolved to leaves")]
    Unresolved(CellId),

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("matrix is singular (pivot {0})")]
    Singular(usize),

    #[error("matrix of size {size} exceeds the dense solver cap {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("conjugate gradient requires a symmetric matrix (symmetry fraction {0:.4})")]
    NotSymmetric(f64),

    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
