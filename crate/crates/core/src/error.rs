use thiserror::Error;

/// Failures reported by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument or parameter lies outside the region where the formula is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A series or iteration did not reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),
    /// Zero bracketing failed or produced an inconsistent table.
    #[error("zero scan failed: {0}")]
    Scan(String),
    /// A moment table is too short for the requested exponent.
    #[error("moment table too short: {0}")]
    Range(String),
    /// Invalid user configuration (empty grid, unknown id, bad tolerance).
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
