use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    /// `|S_j|` fell below the numeric guard; the fast recurrence cannot decide.
    #[error("guard tripped at S_{index} (|S| = {magnitude:e})")]
    GuardTripped { index: usize, magnitude: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("tree has {n} vertices; the exact oracle accepts at most {max}")]
    SizeExceeded { n: usize, max: usize },

    #[error("not a generalized Shearer sequence: radius drops from G_{index} ({prev}) to G_{} ({next})", .index + 1)]
    NotGeneralizedShearer { index: usize, prev: f64, next: f64 },

    #[error("inconsistent limit: {0}")]
    Inconsistent(String),

    #[error("precision cap of {cap} bits reached")]
    PrecisionCap { cap: usize },

    #[error("root bracket failed at j = {index}: g_j(0) = {value:e} is not negative")]
    Bracket { index: usize, value: f64 },
}
