use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a supported prime modulus (primes below 256)")]
    InvalidModulus(u32),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("subspace is not totally singular")]
    NotSingular,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not a clique: {0}")]
    NotAClique(String),

    #[error("search budget of {0} nodes exhausted")]
    BudgetExceeded(u64),

    #[error("special-map violation at {vertex}: {detail}")]
    SpecialMap { vertex: String, detail: String },

    #[error("inconsistent input: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
