use thiserror::Error;

/// Errors raised by the analytic, oracle and simulation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvtError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("arc budget exhausted: {needed} arcs requested, cap is {cap}")]
    ArcBudget { needed: usize, cap: usize },

    #[error("level {level} is below the shape regime (needs level > {minimum})")]
    LevelBelowRegime { level: f64, minimum: f64 },

    #[error("no threshold root in the shape regime: {0}")]
    NoRoot(String),

    #[error("orbit hits a singular point of the map at step {step} (x = {x})")]
    Singular { step: usize, x: f64 },

    #[error("first return not found within {budget} steps")]
    ReturnTimeout { budget: u64 },

    #[error("pullback containment cannot be certified between points {i} and {j}: {detail}")]
    Indeterminate { i: usize, j: usize, detail: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("inconsistent endpoints: {0}")]
    InconsistentEndpoints(String),

    #[error("shape cannot be classified: {0}")]
    Unclassifiable(String),

    #[error("weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },
}

pub type Result<T> = std::result::Result<T, EvtError>;

impl EvtError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        EvtError::InvalidInput(msg.into())
    }
}
