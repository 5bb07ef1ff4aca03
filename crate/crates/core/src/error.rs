//! Crate-wide error type. Every fallible operation returns [`Result`];
//! domain violations carry the name of the violated invariant.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular matrix")]
    SingularMatrix,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("invalid surface data: {0}")]
    InvalidSurface(String),

    #[error("orbit budget exceeded: cap {cap}, orbit already holds {reached} classes")]
    OrbitBudgetExceeded { cap: usize, reached: usize },

    #[error("degenerate cone: {0}")]
    DegenerateCone(String),

    #[error("class is not ample: {0}")]
    NotAmple(String),

    #[error("class is not pseudo-effective")]
    NotPseudoEffective,

    #[error("class is not big: {0}")]
    NotBig(String),

    #[error("class is not nef: {0}")]
    NotNef(String),

    #[error("flag curve must be big and nef: {0}")]
    NotBigNef(String),

    #[error("flag curve must be nonzero")]
    ZeroCurve,

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("no big divisor realizes this support: {0}")]
    NotRealizable(String),

    #[error("remainder lies on a ray with no basis element: {0}")]
    NonBasisRay(String),

    #[error("basis construction requires the general-point flag model")]
    GeneralPointRequired,

    #[error("integer overflow in {0}")]
    Overflow(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
