use thiserror::Error;

/// Errors raised by lattice construction, generator evaluation, periodization,
/// classification and the Gram-matrix oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must be square and non-empty, got {rows} rows with row lengths {cols:?}")]
    NotSquare { rows: usize, cols: Vec<usize> },

    #[error("unsupported dimension {0}: only d = 1, 2, 3 are supported")]
    UnsupportedDimension(usize),

    #[error("matrix is singular: |det| = {det:e} is below the threshold {threshold:e}")]
    SingularMatrix { det: f64, threshold: f64 },

    #[error("matrix is ill-conditioned: condition number {0:e} exceeds 1e8")]
    IllConditioned(f64),

    #[error("non-finite input")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("generator has zero norm (|f|^2 = {0:e})")]
    ZeroGenerator(f64),

    #[error("no decay information for {0}")]
    NoDecayInfo(String),

    #[error("tail bound {target:e} not achievable within truncation radius cap {cap}")]
    TailNotAchievable { target: f64, cap: usize },

    #[error("invalid grid resolution {0}: must be a power of two >= 2")]
    InvalidGrid(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coefficient radius {n_max} exceeds N/4 = {limit} for grid resolution {grid}")]
    AliasRisk { n_max: usize, grid: usize, limit: usize },

    #[error("eps_zero = {eps:e} must be positive and at least 4 x tail = {min:e}")]
    EpsilonTooSmall { eps: f64, min: f64 },

    #[error("generator is not compactly supported")]
    NotCompactlySupported,

    #[error("Gram matrix of order {0} exceeds the limit of 4096")]
    TooLarge(usize),

    #[error("eigen-solver did not converge within {0} iterations")]
    ConvergenceFailure(usize),

    #[error("periodization vanishes on the whole grid; span is degenerate")]
    DegenerateSpan,

    #[error("invalid sample file: {0}")]
    Samples(String),
}

impl Error {
    /// True for failures of the numerical pipeline (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TailNotAchievable { .. }
                | Error::ConvergenceFailure(_)
                | Error::DegenerateSpan
                | Error::NoDecayInfo(_)
                | Error::ZeroGenerator(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
