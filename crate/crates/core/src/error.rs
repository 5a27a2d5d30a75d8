use thiserror::Error;

use crate::sat::SatError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// `offset` is a 0-based character offset into the parsed text.
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("undeclared variable `{name}` at offset {offset}")]
    UndeclaredVariable { name: String, offset: usize },

    #[error("invalid alphabet: {0}")]
    Alphabet(String),

    #[error("alphabet has {vars} variables, above the oracle cap of {cap}")]
    CapExceeded { vars: usize, cap: usize },

    #[error("formula `{formula}` is inconsistent")]
    InconsistentFormula { formula: String },

    #[error("preorders are over different alphabets")]
    AlphabetMismatch,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no underformula cached for the severe antiwithdrawal at position {0}")]
    MissingUnderformula(usize),

    #[error(transparent)]
    Sat(#[from] SatError),

    /// Positions are 1-based.
    #[error("line {line}, column {column}: {message}")]
    Document {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("step {step} ({op}): {source}")]
    Step {
        step: usize,
        op: String,
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps `source` with the 1-based position of the operator that failed.
    pub fn at_step(step: usize, op: String, source: Error) -> Error {
        Error::Step {
            step,
            op,
            source: Box::new(source),
        }
    }

    /// The innermost error, with step provenance peeled off.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            other => other,
        }
    }
}
