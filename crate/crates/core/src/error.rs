use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is outside the supported range [2, {max}]", max = crate::arith::MAX_MODULUS)]
    InvalidModulus(u64),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("5 is a quadratic non-residue modulo {0}")]
    NonResidue(u64),

    #[error("prime index {0} exceeds the supported integer width")]
    Overflow(u64),

    #[error("modulus {value} exceeds the limit {limit} for this operation")]
    ModulusTooLarge { value: u64, limit: u64 },

    #[error("seed ({a}, {b}) is zero modulo {m}")]
    DegenerateSeed { a: i64, b: i64, m: u64 },

    #[error("prime indices start at 1")]
    ZeroIndex,

    #[error("count must be at least 1")]
    EmptyCount,

    #[error("sequence of length {0} is too short (need at least 2 values)")]
    SequenceTooShort(usize),

    #[error("value {value} at position {index} is not +1 or -1")]
    NotSign { index: usize, value: i8 },

    #[error("cannot parse sequence: {0}")]
    Parse(String),

    #[error("invalid origin descriptor: {0}")]
    BadOrigin(String),
}

pub type Result<T> = std::result::Result<T, Error>;
