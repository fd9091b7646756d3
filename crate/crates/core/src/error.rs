use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("letter {letter} is out of range for rank {rank}")]
    LetterOutOfRange { letter: i32, rank: usize },

    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("not a mapping class: {0}")]
    NotMappingClass(String),

    #[error("unknown curve id `{0}`")]
    UnknownCurve(String),

    #[error("{0} is out of range")]
    OutOfRange(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported modulus {0}")]
    UnsupportedModulus(u64),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("refused by size guard: {0}")]
    SizeGuard(String),
}

pub type Result<T> = std::result::Result<T, Error>;
