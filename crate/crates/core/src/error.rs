use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SenseError {
    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("band {band}: weight vector is degenerate (norm {norm:e})")]
    DegenerateWeights { band: usize, norm: f64 },

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid instance: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("grid oracle refuses {vars} variables (cap is {cap})")]
    OracleTooLarge { vars: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, SenseError>;
