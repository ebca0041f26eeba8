use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polar angle {0} rad is outside [0, pi]")]
    PolarOutOfRange(f64),

    #[error("non-finite angle")]
    NonFiniteAngle,

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("projection onto an orthogonal state (probability {0:e})")]
    ImpossibleOutcome(f64),

    #[error("n_trials must be at least 1")]
    ZeroTrials,

    #[error("undefined estimate for channel {channel}: no detections in {detector}")]
    UndefinedEstimate { channel: String, detector: String },

    #[error("inconsistent count table: {0}")]
    InconsistentCounts(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
