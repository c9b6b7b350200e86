use thiserror::Error;

/// Errors produced by channel construction, solvers, and the ensemble harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("mode-{mode} product dimension mismatch: tensor extent {tensor_dim}, operand contracts {operand_dim}")]
    ModeMismatch {
        mode: usize,
        tensor_dim: usize,
        operand_dim: usize,
    },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("non-finite entry: {0}")]
    NonFinite(String),

    #[error("invalid solver config: {0}")]
    InvalidConfig(String),

    #[error("invalid block partition: {0}")]
    InvalidPartition(String),

    #[error("invalid experiment spec: {0}")]
    InvalidExperiment(String),

    #[error("grid too large: {estimated} evaluations exceed the {limit} limit")]
    GridTooLarge { estimated: u128, limit: u64 },

    #[error("ensembles not comparable: {0}")]
    EnsembleMismatch(String),

    #[error("invalid channel fixture: {0}")]
    InvalidFixture(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("fixture parse error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
