use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A testable clause of the standing hypotheses failed on samples.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("value {value} outside the attainable range ({low}, {high})")]
    OutOfRange { value: f64, low: f64, high: f64 },

    /// Arithmetic produced a non-finite value before the blow-up threshold
    /// could register it.
    #[error("non-finite arithmetic at r = {radius}")]
    NonFinite { radius: f64 },

    /// The tail transform diverges, so any bound built on its inverse is vacuous.
    #[error("transform is infinite: {0}")]
    Inapplicable(String),

    #[error("domain too short: {0}")]
    InsufficientDomain(String),

    #[error("no blow-up found along the ray up to parameter {reached}")]
    NoEdge { reached: f64 },

    /// Perturbed central data that should blow up was classified otherwise.
    #[error("perturbed data for k = {k} did not blow up ({outcome})")]
    EdgeHypothesis { k: u32, outcome: String },
}
