use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("empty input")]
    EmptyInput,
    #[error("invalid label {0:?}")]
    InvalidLabel(String),
    #[error("preorder index {index} out of range 1..={len}")]
    IndexOutOfRange { index: String, len: String },
    #[error("unfolding exceeds the node budget of {budget}")]
    BudgetExceeded { budget: u64 },
    #[error("a dag consisting of a single node has no reduced grammar")]
    SingleNodeDag,
    #[error("empty sibling sequence")]
    EmptySequence,
    #[error("grammar is cyclic through {0}")]
    CyclicGrammar(String),
    #[error("malformed grammar: {0}")]
    MalformedGrammar(String),
    #[error("the string grammar is not right regular")]
    NotRightRegular,
    #[error("the compressed dag is not minimal")]
    NonMinimalCompressedDag,
    #[error("instance too large for enumeration ({0} trees)")]
    TooLarge(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("xml error at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
