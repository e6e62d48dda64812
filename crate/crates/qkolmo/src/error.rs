use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not hermitian")]
    NotHermitian,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed transition table: {0}")]
    MalformedTable(String),

    #[error("resource cap exceeded: {what} = {value} (cap {cap})")]
    CapExceeded { what: &'static str, value: u128, cap: u128 },

    #[error("incommensurable normalization: {0}")]
    Incommensurable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("input does not halt within t = {0}")]
    NonHalting(usize),

    #[error("vector is not in the subspace")]
    NotInSubspace,

    #[error("empty span")]
    EmptySpan,

    #[error("Kraft inequality violated: no codeword of length {0} is available")]
    KraftViolated(usize),

    #[error("malformed self-delimiting stream")]
    MalformedStream,

    #[error("search cap exceeded: {0}")]
    SearchCapExceeded(String),

    #[error("codeword matches no halting space within t = {0}")]
    NoMatchingCodeword(usize),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}
