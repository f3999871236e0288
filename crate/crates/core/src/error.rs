use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("undeclared atomic proposition `{0}`")]
    UndeclaredAtom(String),
    #[error("finite word must be nonempty")]
    EmptyWord,
    #[error("lasso period must be nonempty")]
    EmptyPeriod,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("semiautomaton is not counter-free")]
    NotCounterFree,
    #[error("too large: {what} needs {count}, limit is {limit}")]
    TooLarge {
        what: String,
        count: String,
        limit: usize,
    },
    #[error("too many lifted Muller sets: {count} exceeds limit {limit}")]
    TooManySets { count: String, limit: usize },
    #[error("configuration level mismatch: {0}")]
    LevelMismatch(String),
    #[error("bound violation: {0}")]
    BoundViolation(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("language is neither finite nor co-finite")]
    NotLtlExpressible,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("rejected: {0}")]
    Rejected(String),
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Resource-limit errors, reported with their own exit status by the CLI.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::TooLarge { .. } | Error::TooManySets { .. })
    }
}
