use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("undefined feature `{0}`")]
    UndefinedFeature(String),
    #[error("feature index {index} out of range for {len} features")]
    FeatureOutOfRange { index: usize, len: usize },
    #[error("example has {got} values, model has {expected} features")]
    ExampleLength { expected: usize, got: usize },
    #[error("ensemble must contain an odd number of elements, got {0}")]
    EvenEnsemble(usize),
    #[error("ensemble elements must all be of the same model kind")]
    MixedEnsemble,
    #[error("diagram is not ordered: {0}")]
    NotOrdered(String),
    #[error("{features} features exceed the exhaustive-search guard of {guard}")]
    TooLarge { features: usize, guard: usize },
    #[error("construction would need more than {cap} nodes")]
    BudgetExceeded { cap: usize },
    #[error("timed out")]
    Timeout,
    #[error("model is homogeneous")]
    Homogeneous,
    #[error("feature `{0}` is shared between conjoined diagrams")]
    SharedFeature(String),
    #[error("circuit input for feature {0} is unassigned")]
    UnassignedInput(usize),
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by malformed or inconsistent input rather than
    /// by resource limits.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::TooLarge { .. } | Error::BudgetExceeded { .. } | Error::Timeout | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
