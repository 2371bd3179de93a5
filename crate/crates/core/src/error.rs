use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("alphabets differ: {0}")]
    AlphabetMismatch(String),
    #[error("automaton is not weak (state `{0}` is not locally accepting)")]
    NotWeak(String),
    #[error("automaton is not deterministic: {0}")]
    NotDeterministic(String),
    #[error("automaton is not complete: {0}")]
    NotComplete(String),
    #[error("level bound exceeded: {0}")]
    LevelBound(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
