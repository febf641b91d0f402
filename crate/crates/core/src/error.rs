use thiserror::Error;

/// Errors raised by the estimators and closed-form evaluations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the function.
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    /// The data cannot support the statistic (all ties, zero variance, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Identical sample points make nearest-neighbour distances vanish.
    #[error(
        "{count} duplicate point(s) in KSG input; use the rank transform with jitter tie-breaking"
    )]
    DuplicatePoints { count: usize },

    #[error("need at least {required} observations, got {actual}")]
    TooFewObservations { required: usize, actual: usize },

    /// An information excess above what any admissible T-copula can produce.
    #[error("information excess {value} exceeds the ceiling {ceiling} reached at nu = {nu_min}")]
    ExcessOutOfRange {
        value: f64,
        ceiling: f64,
        nu_min: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
