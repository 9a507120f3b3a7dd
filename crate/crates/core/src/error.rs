use num_bigint::BigInt;
use thiserror::Error;

use crate::cstriple::CsTriple;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("({c},{d},{n}) is not a CS triple: d must be nonzero and divide f_n(c)")]
    InvalidTriple { c: BigInt, d: BigInt, n: BigInt },
    #[error("modulus {0} is not prime")]
    CompositeModulus(BigInt),
    #[error("modulus {0} is out of range")]
    ModulusOutOfRange(BigInt),
    #[error("polynomial is zero modulo {0}")]
    ZeroPolynomial(BigInt),
    #[error("cannot factor zero")]
    FactorZero,
    #[error("lattice basis is rank deficient")]
    RankDeficient,
    #[error("ideals belong to different orders (traces {0} and {1})")]
    OrderMismatch(BigInt, BigInt),
    #[error("postcondition failed for {triple}: {what}")]
    Postcondition { triple: CsTriple, what: String },
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
