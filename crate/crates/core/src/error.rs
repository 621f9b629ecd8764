use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is empty")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigenvalue solver did not converge")]
    EigenSolverFailed,

    #[error("index of eigenvalue {value} could not be resolved within its multiplicity {multiplicity}")]
    IndexCapExceeded { value: String, multiplicity: usize },

    #[error("eigenvalue clusters too close for a stable splitting (gap {gap:.3e})")]
    IllConditionedClusters { gap: f64 },

    #[error("matrix powers do not converge")]
    NotConvergent,

    #[error("fewer than 3 usable samples for the rate fit ({usable})")]
    InsufficientSamples { usable: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate subspace: {0}")]
    DegenerateSubspace(String),

    #[error("Friedrichs angle undefined: U is contained in V")]
    FriedrichsUndefined,

    #[error("{0} is nonlinear and has no matrix; use the step operations")]
    NonlinearMethod(String),

    #[error("iterate {index} is not finite")]
    Divergence { index: usize },

    #[error("cell {cell} is infeasible: {reason}")]
    InfeasibleCell { cell: String, reason: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
