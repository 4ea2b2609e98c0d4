use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator matrix is rank deficient (smallest/largest singular value {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("SNR must be non-negative, got {0}")]
    NegativeSnr(f64),

    #[error("expected a positive input for {0}")]
    NonPositiveInput(&'static str),

    #[error("message index {index} out of range for codebook of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("codeword is not in the codebook of user {0}")]
    CodewordNotInCodebook(crate::User),

    #[error("shaping interval half-width must be a positive even integer, got {0}")]
    OddL(i64),

    #[error("parity construction failed: {0}")]
    ConstructionFailed(String),

    #[error("integer message {value} at position {index} is outside its constellation")]
    ConstellationViolation { index: usize, value: i64 },

    #[error("triangular factor has a vanishing diagonal entry at row {0}")]
    SingularTriangle(usize),

    #[error("residue {residue} at position {index} is not a multiple of {scale}")]
    NonDivisible {
        index: usize,
        residue: i64,
        scale: i64,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("bit count {bits} is not a multiple of {bits_per_symbol} bits per symbol")]
    LengthNotMultiple { bits: usize, bits_per_symbol: usize },

    #[error("coded lengths differ: user A {a}, user B {b}")]
    CodedLengthMismatch { a: usize, b: usize },

    #[error("trial {index} failed: {message}")]
    TrialFailed { index: u64, message: String },
}
