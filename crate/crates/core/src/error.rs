use thiserror::Error;

/// Errors produced while building or evaluating Minkowski-sum scenes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (relative asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite (eigenvalues in [{min:.3e}, {max:.3e}])")]
    NotPositiveDefinite { min: f64, max: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("direction vector has zero length")]
    ZeroDirection,

    #[error("scene has no ellipsoids")]
    EmptyScene,

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("chart point lies within {0:e} of a coordinate pole")]
    ChartPole(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
