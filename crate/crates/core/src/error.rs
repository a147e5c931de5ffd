use thiserror::Error;

/// Errors raised when a value falls outside the model's parameter domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("n must be even (got {0})")]
    OddFaceCount(i64),
    #[error("n must be at least 4 (got {0})")]
    TooFewFaces(i64),
    #[error("epsilon out of range: {0} is not in [0, 1]")]
    EpsilonOutOfRange(f64),
    #[error("rho out of range: {0} is not in [0, 1]")]
    RhoOutOfRange(f64),
    #[error("orientation index {index} out of range for an {n}-prism")]
    OrientationOutOfRange { index: u32, n: u32 },
    #[error("preparation regime {regime} cannot target outcome {target}")]
    InvalidTarget { regime: char, target: String },
    #[error("coincidence experiments pair one A experiment with one B experiment")]
    InvalidPairing,
    #[error("probability {value} for outcome {outcome} is not in [0, 1]")]
    ProbabilityOutOfRange { outcome: &'static str, value: f64 },
    #[error("joint distribution sums to {0}, expected 1")]
    NotNormalized(f64),
    #[error("trial count must be at least 1")]
    ZeroTrials,
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("grid step must be a positive finite number (got {0})")]
    InvalidStep(f64),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
