use thiserror::Error;

/// Broad classification of failures, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Validation,
    Coverage,
    Unsupported,
    Capacity,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("{0} does not divide {1}")]
    NotADivisor(u64, u64),

    #[error("permutation degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("group order exceeds the cap of {cap} elements")]
    GroupTooLarge { cap: usize },

    #[error("trivial extension (d = j = 1) has no counting asymptotics")]
    TrivialExtension,

    #[error("invalid setup: {0}")]
    InvalidSetup(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),

    #[error("unknown place `{0}`")]
    UnknownPlace(String),

    #[error("place `{0}` is ramified in F; Frobenius is undefined")]
    RamifiedPlace(String),

    #[error("place `{0}` is exceptional")]
    ExceptionalPlace(String),

    #[error("prime norm {needed} is beyond the listed coverage bound {bound}")]
    BeyondCoverage { needed: u64, bound: u64 },

    #[error("stochastic (sampled) tail oracle cannot be used for {0}")]
    StochasticRejected(&'static str),

    #[error("search space {size} exceeds the configured cap {cap}")]
    SearchTooLarge { size: u128, cap: u128 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("character sum did not collapse to an integer at metric value {0}")]
    NonIntegralCharacterSum(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Parse(_) => ErrorKind::Parse,
            BeyondCoverage { .. } | StochasticRejected(_) => ErrorKind::Coverage,
            GroupTooLarge { .. } | SearchTooLarge { .. } => ErrorKind::Capacity,
            Unsupported(_) | TrivialExtension => ErrorKind::Unsupported,
            _ => ErrorKind::Validation,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
