use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("tensor power mismatch: expected {expected}, found {found}")]
    PowerMismatch { expected: usize, found: usize },

    #[error("strand count mismatch: {left} vs {right}")]
    StrandMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric rank unstable: {ranks:?} at relative tolerances {tolerances:?}")]
    RankInstability {
        ranks: Vec<usize>,
        tolerances: Vec<f64>,
    },

    #[error("bent rank {bent} disagrees with Gram rank {gram}")]
    BendMismatch { bent: usize, gram: usize },

    #[error("fusion product needs level {required} but truncation level is {level}")]
    TruncationOverflow { required: usize, level: usize },

    #[error("negative multiplicity for label {label} at step {step}")]
    NegativeMultiplicity { step: usize, label: usize },

    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
