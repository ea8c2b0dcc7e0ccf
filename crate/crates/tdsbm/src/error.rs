use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Input file or column map does not match the documented schema.
    #[error("schema error: {0}")]
    Schema(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    /// Array shapes, node counts, or label values that do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A zero Poisson mean under a positive observed count has likelihood
    /// negative infinity; reported as a condition instead of a silent -inf.
    #[error("zero mean with positive count at origin {origin}, destination {destination}, layer {layer}")]
    ZeroMeanPositiveCount {
        origin: usize,
        destination: usize,
        layer: usize,
    },

    /// A nonempty block with no incident trips makes the degree-corrected
    /// maximum likelihood estimate undefined.
    #[error("block {block} is nonempty but has no incident trips")]
    ZeroBlockDegree { block: usize },

    #[error("every restart aborted with non-finite likelihood")]
    NoValidRestart,

    #[error("stations missing coordinates: {0:?}")]
    MissingCoordinates(Vec<String>),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
