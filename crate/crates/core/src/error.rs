use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sieve limit {limit} is below 2")]
    LimitTooSmall { limit: u64 },

    #[error("sieve limit {limit} exceeds the memory cap {cap}")]
    LimitAboveCap { limit: u64, cap: u64 },

    #[error("residue {residue} is not coprime to modulus {modulus} (gcd {gcd})")]
    NotCoprime { residue: u64, modulus: u64, gcd: u64 },

    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("empty window: lo {lo} > hi {hi}")]
    EmptyWindow { lo: u64, hi: u64 },

    #[error("invalid tuple: {0}")]
    InvalidTuple(String),

    #[error("tuple is not admissible: it covers every residue class modulo {prime}")]
    NotAdmissible { prime: u64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("degenerate basis: element {index} ({label}) is linearly dependent on the others")]
    DegenerateBasis { index: usize, label: String },

    #[error("form B is numerically indefinite; smallest pivot {pivot:e}")]
    Indefinite { pivot: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("prime table covers up to {have} but {need} is required")]
    TableTooSmall { have: u64, need: u64 },

    #[error("insufficient primes: found {found} in range, need {needed}")]
    InsufficientPrimes { found: usize, needed: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
