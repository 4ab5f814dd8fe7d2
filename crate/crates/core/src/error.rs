use thiserror::Error;

/// Errors raised across the simulator and numeric toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("edge ({0}, {1}) is not in the graph")]
    EdgeAbsent(usize, usize),

    #[error("graph is not bipartite")]
    NotBipartite,

    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("supremum is unbounded at x = {x}")]
    Unbounded { x: f64 },

    #[error("only {got} conditioned samples, need {need}")]
    InsufficientSamples { got: u64, need: u64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {v} is not in [0, 1]"
        )))
    }
}
