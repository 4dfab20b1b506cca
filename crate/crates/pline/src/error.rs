use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("singular matrix")]
    Singular,
    #[error("argument error: {0}")]
    Argument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid circuit: {0}")]
    Circuit(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("capability exceeded: {0}")]
    Capability(String),
    #[error("step budget of {0} exhausted")]
    BudgetExhausted(u64),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("not a solution: {0}")]
    Contract(String),
    #[error("promise violated: {0}")]
    PromiseViolation(String),
    #[error("internal invariant breach: {0}")]
    Breach(String),
}

pub type Result<T> = std::result::Result<T, Error>;
