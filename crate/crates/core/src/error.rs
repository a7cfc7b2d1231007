use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} is outside [0, 1]")]
    NotUnit { value: f64 },

    #[error("invalid ordinal sum: {0}")]
    InvalidTNorm(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("operation `{op}` is not supported for {what}")]
    Unsupported { op: &'static str, what: String },

    #[error("convolution would produce {size} plateau candidates (cap {cap})")]
    SizeCap { size: usize, cap: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("closure made the entry between `{x}` and `{y}` equal to kappa")]
    SeparationLost { x: String, y: String },

    #[error("carrier of size {size} exceeds the cap of {cap}")]
    CarrierCap { size: usize, cap: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("generator gave up after {attempts} attempts: {reason}")]
    GeneratorExhausted { attempts: usize, reason: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
