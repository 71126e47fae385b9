use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("Neumann series did not converge: {0}")]
    NotConvergent(String),
    #[error("power norms left the representable range")]
    Overflow,
    #[error("operation not supported by this instance: {0}")]
    NotSupported(&'static str),
    #[error("instance has no involution")]
    NoInvolution,
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("Wiener degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("kernel grids or weights differ")]
    GridMismatch,
    #[error("scalar part is zero; the inverse cannot lie in the unitized algebra")]
    ZeroScalarPart,
    #[error("matrix is singular to working precision")]
    SingularToWorkingPrecision,
    #[error("operands belong to different algebra descriptors")]
    DescriptorMismatch,
    #[error("n_max must be a power of two and at least 4, got {0}")]
    BadPowerCount(usize),
    #[error("malformed payload: {0}")]
    Payload(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operands belong to different algebra descriptors")]
    DescriptorMismatch,
    #[error("target dimension {target} is smaller than {source_dim}")]
    BadDimension { source_dim: usize, target: usize },
    #[error("cannot nest a matrix of odd dimension {0}")]
    OddDimension(usize),
    #[error("(1,1) pivot is not the unit (distance {0:e})")]
    PivotNotUnit(f64),
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("matrix is not invertible in the ambient algebra: {0}")]
    NotInvertibleInAmbient(String),
    #[error("limit of perturbed inverses stalled after {terms} terms (last step {last_step:e})")]
    ApproximationStalled { terms: usize, last_step: f64 },
    #[error("entry ({row},{col}) fails the inessential proxy required by the mask")]
    MaskViolation { row: usize, col: usize },
    #[error("diagonal entry {0} is not invertible")]
    DiagonalNotInvertible(usize),
    #[error("entry ({row},{col}) below the diagonal is nonzero")]
    NotTriangular { row: usize, col: usize },
    #[error("matrix is not hermitian (‖T - T*‖ = {0:e})")]
    NotHermitian(f64),
    #[error("instance has no involution")]
    NoInvolution,
    #[error("instance is not a symmetric *-algebra")]
    NotSymmetric,
    #[error("matrix is singular to working precision")]
    SingularToWorkingPrecision,
    #[error("residual {residual:e} exceeds tolerance {tol:e}")]
    ToleranceNotMet { residual: f64, tol: f64 },
    #[error("no admissible lambda found within {0} attempts")]
    NoAdmissibleLambda(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Error)]
pub enum SerialError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("file describes a {found} matrix, expected {expected}")]
    WrongInstance { expected: &'static str, found: String },
    #[error("malformed matrix file: {0}")]
    Shape(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
