use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported dimension {0}: only prime qudit dimensions have a Weyl MUB construction here")]
    UnsupportedDimension(usize),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid probability: {0}")]
    InvalidProbability(String),
    #[error("invalid count data: {0}")]
    InvalidCounts(String),
    #[error("numerical validity: {0}")]
    NumericalValidity(String),
    #[error("wrong likelihood kind: expected {expected}")]
    WrongLikelihoodKind { expected: &'static str },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("chain initialization failed after {0} prior draws with non-finite posterior")]
    Initialization(usize),
    #[error("empty chain")]
    EmptyChain,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed file: {source}")]
    Format {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}
