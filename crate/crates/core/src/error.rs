use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lacunarity constant must exceed 1, got {0}")]
    InvalidRatio(f64),
    #[error("sequence must be nonempty")]
    EmptySequence,
    #[error("sequence entries must be positive")]
    NonPositive,
    #[error("sequence is not strictly increasing at index {index}")]
    NotIncreasing { index: usize },
    #[error("consecutive ratio {ratio} at index {index} is below the lacunarity constant {alpha}")]
    NotLacunary { index: usize, ratio: f64, alpha: f64 },
    #[error("k_max = {k_max} exceeds the {available} blocks the sequence supports")]
    BlockCount { k_max: usize, available: usize },
    #[error("exponent s must be finite and at least 2, got {0}")]
    InvalidExponent(f64),
    #[error("block vectors live in different spaces")]
    ShapeMismatch,
    #[error("dyadic exponent {0} overflows a 64-bit length")]
    ExponentOverflow(u64),
    #[error("grid step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("degenerate interval [{a}, {b}]")]
    DegenerateInterval { a: f64, b: f64 },
    #[error("{what} = {value} is not aligned to the grid step {step}")]
    Misaligned { what: &'static str, value: f64, step: f64 },
    #[error("orbit horizon {available} is shorter than the required {required}")]
    InsufficientHorizon { required: f64, available: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("empty function family")]
    EmptyFamily,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
