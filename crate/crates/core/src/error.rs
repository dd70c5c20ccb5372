use thiserror::Error;

/// Coarse classification used by callers that must map failures to exit
/// codes: bad input versus a numerical method giving up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    InvalidInput,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid norm spec: {0}")]
    InvalidSpec(String),

    #[error("non-finite input in {0}")]
    NonFinite(&'static str),

    #[error("gradient undefined at the origin")]
    ZeroVector,

    #[error("smoothness probe failed: one-sided differences disagree ({0})")]
    NotSmooth(String),

    #[error("operator is not real-diagonalizable: {reason}")]
    NotDiagonalizable { reason: &'static str },

    #[error("group index {index} out of range (k = {k})")]
    GroupIndex { index: usize, k: usize },

    #[error("vector is not within tolerance of a single eigenvalue group")]
    NotInGroup,

    #[error("basis is rank-deficient")]
    DegenerateBasis,

    #[error("subspaces do not form a direct-sum decomposition of the space")]
    NotADecomposition,

    #[error("{0}")]
    Invalid(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Numerical(_) | Error::NotSmooth(_) => ErrorKind::Numerical,
            _ => ErrorKind::InvalidInput,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
