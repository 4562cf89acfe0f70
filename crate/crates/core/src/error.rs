use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid flavor `{0}` (valid: seq, unroll:k, vec:w with k, w in 2, 4, 8, 16)")]
    InvalidFlavor(String),

    #[error("unknown method `{0}` (valid: direct, wide, twofold-fast, twofold-rigorous, kahan)")]
    UnknownMethod(String),

    #[error("dot product operands differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("relative error is undefined for a zero reference")]
    ZeroReference,

    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
