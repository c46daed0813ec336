use thiserror::Error;

/// Errors produced by the rm-access library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sequence order m = {0} is outside the supported range 2..=16")]
    InvalidOrder(usize),

    #[error("user id {value} does not fit in {bits} bits (m = {m})")]
    IdOutOfRange { value: u128, m: usize, bits: usize },

    #[error("invalid matrix-vector pair: {0}")]
    InvalidPair(String),

    #[error("layer index s = {s} is outside 2..={m}")]
    LayerOutOfRange { s: usize, m: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("signal of length {len} is too short (need at least {min})")]
    SignalTooShort { len: usize, min: usize },

    #[error("invalid list parameters: {0}")]
    InvalidListParams(String),

    #[error("user slot {k} is outside 0..{k_max}")]
    SlotOutOfRange { k: usize, k_max: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
