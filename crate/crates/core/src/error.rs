use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid fitness spec: {0}")]
    InvalidSpec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state space too large: n = {n} exceeds the cap of {cap}")]
    StateSpaceTooLarge { n: usize, cap: usize },

    #[error("{0} is not a function of the number of ones; level aggregation is invalid")]
    NotLevelSymmetric(String),

    #[error("every state of the chain is optimal; error-change ratios are undefined")]
    AllStatesOptimal,

    #[error("temperature too high: error-change ratio at level {level} is {ratio:e} <= 0")]
    TemperatureTooHigh { level: usize, ratio: f64 },

    #[error("chain invariant violated: {0}")]
    ChainInvariant(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by user input rather than by the environment.
    pub fn is_config_error(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
