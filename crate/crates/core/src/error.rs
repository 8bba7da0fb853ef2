use thiserror::Error;

use crate::verify::VerificationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate element {0} in block")]
    DuplicateElement(u32),

    #[error("element {element} out of range for order {order}")]
    OutOfRange { element: u32, order: u32 },

    #[error("block must hold between 1 and {max} elements, got {len}")]
    BlockLength { len: usize, max: usize },

    #[error("block has {got} elements, design block size is {expected}")]
    BlockSizeMismatch { expected: usize, got: usize },

    #[error("design has no blocks")]
    EmptyDesign,

    #[error("bound (n(k-t+1) + k(t-2))/2 is not integral for t={t}, k={k}, n={n}")]
    NonIntegralBound { t: u32, k: u32, n: u32 },

    #[error("unsupported design parameters: strength {strength}, block size {block_size}")]
    UnsupportedParameters { strength: u32, block_size: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid order {order}: {reason}")]
    InvalidOrder { order: u32, reason: &'static str },

    #[error("precondition failed: {context}")]
    PreconditionFailed {
        context: String,
        report: Box<VerificationReport>,
    },

    #[error("construction produced an invalid design: {context}")]
    PostconditionFailed {
        context: String,
        report: Box<VerificationReport>,
    },

    #[error("order {0} is too large for exhaustive search")]
    UnsupportedOrder(u32),

    #[error("catalog error: {0}")]
    Catalog(String),

    #[error("unknown format {0:?}")]
    Format(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
