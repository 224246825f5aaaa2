use thiserror::Error;

/// Errors raised by the numerical and categorical operations of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no convergence after {iterations} iterations: {what}")]
    ConvergenceFailure { what: String, iterations: usize },
    #[error("not positive: minimum eigenvalue {min_eigenvalue:e} below -{threshold:e}")]
    NotPositive { min_eigenvalue: f64, threshold: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("not monotone at index {index}: {detail}")]
    NotMonotone { index: usize, detail: String },
    #[error("lazy chain or family has no upper bound")]
    NoBound,
    #[error("term {index} exceeds the declared bound")]
    BoundViolated { index: usize },
    #[error("gram mismatch: |f*f - g*g| = {residual:e} exceeds {threshold:e}")]
    GramMismatch { residual: f64, threshold: f64 },
    #[error("not a contraction: {0}")]
    NotContraction(String),
    #[error("family is not orthogonal: terms {0} and {1}")]
    NotOrthogonal(usize, usize),
    #[error("lazy family has no tail certificate")]
    NoTailCertificate,
    #[error("not an l2-span: {0}")]
    NotL2Span(String),
    #[error("cospan legs {0} and {1} are not orthogonal")]
    NotOrthogonalCospan(usize, usize),
    #[error("not an isometry: {0}")]
    NotIsometric(String),
    #[error("not composable: {0}")]
    NotComposable(String),
    #[error("not a cocone: {0}")]
    NotCocone(String),
    #[error("not a cone: {0}")]
    NotCone(String),
    #[error("subspace is not invariant under the representation (residual {residual:e})")]
    InvarianceViolation { residual: f64 },
    #[error("not an intertwiner (residual {residual:e})")]
    NotIntertwiner { residual: f64 },
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
