use thiserror::Error;

/// Errors surfaced by the exact geometry engine, the network converter and
/// the experiment harness.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty point set: {0}")]
    EmptyPointSet(&'static str),

    #[error("negative scale factor (handled by the positive/negative split, never here)")]
    NegativeScale,

    #[error("negative matrix entry at ({row},{col})")]
    NegativeEntry { row: usize, col: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unsupported input dimension {0} (exact cell complexes are built for d <= 2)")]
    UnsupportedDimension(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),
}

pub type Result<T> = std::result::Result<T, Error>;
