use thiserror::Error;

/// Errors produced by program construction, the Fourier engine, samplers and the generator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("width mismatch at seam {index}: layer {index} outputs {left} states but the next layer expects {right}")]
    Seam {
        index: usize,
        left: usize,
        right: usize,
    },

    #[error("layer {layer}: {reason}")]
    InvalidLayer { layer: usize, reason: String },

    #[error("order is not a permutation of 0..{n}: {reason}")]
    BadPermutation { n: usize, reason: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("{what} needs {needed} but the budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("layer {0} holds averaged (non-Boolean) matrices and cannot be evaluated as a 0/1 program")]
    NotBoolean(usize),

    #[error("unsupported field degree m = {0} (table covers 1..=32)")]
    UnsupportedField(u32),

    #[error("seed length mismatch: expected {expected} bits, got {got}")]
    BadSeedLength { expected: usize, got: usize },

    #[error("seed exhausted: requested {requested} bits with {remaining} remaining")]
    SeedExhausted { requested: usize, remaining: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
