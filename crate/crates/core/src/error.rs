use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation of zero undefined")]
    ValuationOfZero,

    #[error("valuation base must be a prime, got {0}")]
    InvalidPrime(u64),

    #[error("modulus must be at least 1")]
    ZeroModulus,

    #[error("unsupported modulus shape {0}: expected 2^i * 5^j")]
    UnsupportedModulus(BigUint),

    #[error("residue {residue} out of range for modulus {modulus}")]
    ResidueOutOfRange { residue: BigUint, modulus: BigUint },

    #[error("base excluded by conjecture: {0} is a multiple of 10 (q = 10h is not allowed)")]
    ExcludedBase(u64),

    #[error("base must be at least 2, got {0}")]
    BaseTooSmall(u64),

    #[error("cofactor not coprime to 10: {0}")]
    CofactorNotCoprime(u64),

    #[error("digit count {n} outside 1..={cap}")]
    DigitsOutOfRange { n: u32, cap: u32 },

    #[error("closed-form formulas require x >= 2 (got x = {0}); use predict_small_x")]
    SmallExponentRequiresTable(u32),

    #[error("small-x lookup requires x in {{0, 1}}, got {0}")]
    NotSmallExponent(u32),

    #[error("exponent must be positive")]
    ZeroExponent,

    #[error("cofactor {0} does not fit in 64 bits")]
    CofactorTooLarge(BigUint),

    #[error("empty range for {0}")]
    EmptyRange(&'static str),

    #[error("unknown table identifier {0:?}")]
    UnknownTable(String),

    #[error("invalid range {0:?}")]
    InvalidRange(String),
}
