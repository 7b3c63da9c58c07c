use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("invalid symbol '{0}': {1}")]
    BadSymbol(String, String),

    #[error("rank mismatch: symbol '{symbol}' used with {used} children, declared ranks {declared:?}")]
    RankMismatch {
        symbol: String,
        used: usize,
        declared: Vec<usize>,
    },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("cap exceeded: construction would pass {cap} elements")]
    CapExceeded { cap: usize },

    #[error("missing transition for ({symbol}, {states:?}) in deterministic automaton")]
    MissingTransition { symbol: String, states: Vec<String> },

    #[error("flag violation: {0}")]
    FlagViolation(String),

    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: String, name: String },

    #[error("unresolved reference '@{0}'")]
    UnresolvedReference(String),

    #[error("ill-formed {kind}: {msg}")]
    IllFormed { kind: String, msg: String },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub(crate) fn ill_formed(kind: &str, msg: impl Into<String>) -> Self {
        Error::IllFormed {
            kind: kind.to_string(),
            msg: msg.into(),
        }
    }
}
