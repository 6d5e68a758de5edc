use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("missing parameter `{0}`")]
    MissingParameter(String),

    #[error("truncation too large: dimension {dim} exceeds cap {cap}")]
    TruncationTooLarge { dim: usize, cap: usize },

    #[error("operator is not Hermitian: max |H - H†| = {deviation:e} > {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("eigensolver did not converge after {iterations} iterations ({matvecs} matvecs, worst residual {residual:e}, tolerance {tolerance:e})")]
    NoConvergence {
        iterations: usize,
        matvecs: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("at flux {flux}: {source}")]
    AtFlux {
        flux: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("truncation not converged: {0}")]
    Unconverged(String),

    #[error("regime error: {0}")]
    Regime(String),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("no superconducting transition: {0}")]
    NoTransition(String),

    #[error("ambiguous transition: level {level} crossed at temperatures {crossings:?}")]
    AmbiguousTransition { level: f64, crossings: Vec<f64> },

    #[error("degenerate normalization: {0}")]
    DegenerateNormalization(String),

    #[error("rank deficient fit: {0}")]
    Rank(String),

    #[error("fit did not converge after {iterations} iterations (objective trace {trace:?})")]
    FitConvergence { iterations: usize, trace: Vec<f64> },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    /// True for failures of numerical procedures (eigensolvers, fits) or
    /// resource limits, as opposed to bad inputs or I/O.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::TruncationTooLarge { .. }
            | Error::NoConvergence { .. }
            | Error::Unconverged(_)
            | Error::Regime(_)
            | Error::Estimation(_)
            | Error::Rank(_)
            | Error::FitConvergence { .. }
            | Error::NotHermitian { .. } => true,
            Error::AtFlux { source, .. } => source.is_numeric(),
            _ => false,
        }
    }

    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(_)),
            Error::AtFlux { source, .. } => source.is_io(),
            _ => false,
        }
    }
}
