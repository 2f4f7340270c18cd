use thiserror::Error;

/// Errors shared by the simulator, engine, synthesis and mapping modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qbit index {qbit} out of range for {num_qbits} qbits")]
    QbitOutOfRange { qbit: usize, num_qbits: usize },

    #[error("register of {requested} qbits exceeds the supported maximum of {max}")]
    TooManyQbits { requested: usize, max: usize },

    #[error("malformed gate: {0}")]
    InvalidGate(String),

    #[error("initialization matrix is not orthogonal (max |M^T M - I| = {deviation:.3e})")]
    NonOrthogonal { deviation: f64 },

    #[error("unitary initialization must be the first gate of a circuit")]
    InitNotFirst,

    #[error("empty input")]
    EmptyInput,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("input length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("input of {got} values exceeds the limit of {limit}")]
    InputTooLarge { got: usize, limit: usize },

    #[error("input vector is all zero")]
    ZeroVector,

    #[error("vector is not unit length (|v| = {0})")]
    NotUnit(f64),

    #[error("anchor state {state} out of range for {num_qbits} qbits")]
    StateOutOfRange { state: usize, num_qbits: usize },

    #[error("pattern flip gate requires a non-zero anchor state")]
    ZeroAnchor,

    #[error("weights must be +1 or -1")]
    NonBinaryWeight,

    #[error("no backend with at least {needed} qbits")]
    NoBackendFits { needed: usize },

    #[error("shape mismatch: expected {expected_h}x{expected_w}, got {got_h}x{got_w}")]
    ShapeMismatch {
        expected_h: usize,
        expected_w: usize,
        got_h: usize,
        got_w: usize,
    },

    #[error("dataset has {classes} classes but the network has {outputs} output neurons")]
    ClassCountMismatch { classes: usize, outputs: usize },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("no samples match the requested digits")]
    NoMatchingSamples,

    #[error("unsupported target resolution {0} (expected 4, 8 or 16)")]
    UnsupportedResolution(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
