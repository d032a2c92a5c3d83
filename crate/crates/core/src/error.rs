//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two blocks that must share a length do not.
    #[error("length mismatch: {context} (expected {expected}, got {got})")]
    LengthMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A combinatorial count does not fit in the result type.
    #[error("term count overflow: {0}")]
    Overflow(String),

    /// A dictionary column came out identically zero and cannot be normalized.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Least squares requested with fewer observations than unknowns.
    #[error("underdetermined system: {rows} observations for {cols} unknowns")]
    Underdetermined { rows: usize, cols: usize },

    /// The reference auto-correlation matrix is singular even after loading.
    #[error("singular dictionary: Cholesky pivot {pivot:.3e} at column {index}")]
    SingularDictionary { index: usize, pivot: f64 },

    /// Incremental factorization rejected a column as linearly dependent.
    #[error("degenerate column: augmented pivot {pivot:.3e} below threshold")]
    DegenerateColumn { pivot: f64 },

    /// A scenario configuration failed validation.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
