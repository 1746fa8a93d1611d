use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown graph `{0}`")]
    UnknownGraph(String),

    #[error("{what}: search budget of {budget} nodes exhausted")]
    BudgetExhausted { what: &'static str, budget: u64 },

    #[error("{what} supports at most {limit} vertices, got {vertices}")]
    TooLarge {
        what: &'static str,
        vertices: usize,
        limit: usize,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{0} contexts requested: a GHZ-type paradox needs at least three complete contexts")]
    TooFewContexts(usize),

    #[error("graph is not regular")]
    NotRegular,

    #[error("graph is not {0}-colorable")]
    NotColorable(usize),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("modulation amplitude {value:.6} at pulse {index} exceeds the limit {limit:.6}")]
    ModulationRange { index: usize, value: f64, limit: f64 },

    #[error("phase draw retry budget of {0} exhausted")]
    RetryBudget(usize),

    #[error("phase readout did not converge within {0} iterations")]
    Calibration(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
