use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("degree must be at least 1")]
    DegreeZero,
    #[error("field of size {0} exceeds the supported maximum 2^20")]
    FieldTooLarge(u128),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable x{index} (polynomial has {n} variables)")]
    UnknownVariable { index: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("enumeration of {needed} evaluations exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("Monte-Carlo mode needs at least one sample")]
    ZeroSamples,
    #[error("block structure mismatch: {0}")]
    BlockMismatch(String),
    #[error("bias is exactly zero; the partition-rank lower bound is unbounded")]
    ZeroBias,
    #[error("the span contains a nonzero constant")]
    ConstantInSpan,
    #[error("constant {0} must be positive")]
    NonpositiveConstant(&'static str),
    #[error("extension counting needs a prime base field, got q = {0}")]
    NonPrimeBase(u32),
    #[error("{equations} equations but only {variables} variables")]
    MoreEquationsThanVariables { equations: usize, variables: usize },
    #[error("point-count table has no rows")]
    EmptyTable,
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("degree too low: {0}")]
    DegreeTooLow(String),
    #[error("members are linearly dependent")]
    DependentFamily,
    #[error("exact bias is not a rational number: {0}")]
    NotRational(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
