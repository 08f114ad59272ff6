use thiserror::Error;

/// Errors surfaced by code construction, decoding and experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid lattice size L={0}: must be at least 3")]
    InvalidSize(usize),
    #[error("lattice size L={0} outside the validated range 3..=200")]
    OutOfValidatedRange(usize),
    #[error("computed code dimension k={found} does not match expected k={expected}")]
    DegenerateCodeSpace { expected: usize, found: usize },
    #[error("defects of sector {0:?} passed to a sweep for the other sector")]
    SectorMismatch(crate::code::Sector),
    #[error("total transition rate is zero; the chain cannot advance")]
    FrozenState,
    #[error("need at least {needed} uncensored samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("hook of level {level} does not fit a lattice of size {size}")]
    DoesNotFit { level: usize, size: usize },
    #[error("chunk box parameter Q={0} is too small; need Q >= 6")]
    QTooSmall(usize),
    #[error("chunk enumeration exceeded the budget of {0} chunks")]
    ChunkBudgetExceeded(usize),
    #[error("{0}")]
    Io(String),
    #[error("malformed record: {0}")]
    MalformedRecord(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
