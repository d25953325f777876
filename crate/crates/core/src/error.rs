use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported bound 2^62")]
    ModulusTooLarge(u64),
    #[error("exponent {e} does not divide p - 1 = {order}")]
    ExponentDoesNotDivide { e: u64, order: u64 },
    #[error("exponent must be positive")]
    ZeroExponent,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{value} is not a residue modulo {p}")]
    OutOfDomain { value: u64, p: u64 },

    #[error("duplicate interpolation node {0}")]
    DuplicateNode(u64),
    #[error("malformed polynomial: {0}")]
    BadPolynomial(String),

    #[error("{0} is outside the supported range 1..=2^40")]
    ExponentTooLarge(u64),
    #[error("target is not in the subgroup generated by the base")]
    NotInSubgroup,
    #[error("input is not an e-th power")]
    NotAnEthPower,
    #[error("zero has no multiplicative root")]
    ZeroInput,

    #[error("oracle parameters differ: ({0}, {1}) vs ({2}, {3})")]
    OracleMismatch(u64, u64, u64, u64),
    #[error("oracle transport failure: {0}")]
    Transport(String),
    #[error("oracle protocol violation: {0}")]
    Protocol(String),

    #[error("query budget {h} does not fit in a field of {p} elements")]
    BudgetExceedsField { h: u64, p: u64 },
    #[error("budget parameters give a zero product-set order")]
    DegenerateBudget,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("d * e = {de} is not below p = {p}")]
    DegreeOverflow { de: u64, p: u64 },
    #[error("interpolated polynomial is not a monic e-th power")]
    NotAPerfectPower,
    #[error("no candidate passed verification in any round")]
    SearchExhausted,
    #[error("fewer than d non-root anchors among the first 2d + 1 points")]
    TooManyRoots,
    #[error("search space e^d = {0} exceeds the ceiling {1}")]
    SearchTooLarge(u128, u64),

    #[error("field of {0} elements is too large for an exhaustive scan")]
    FieldTooLarge(u64),
    #[error("product-set enumeration of {0} tuples exceeds the limit")]
    BudgetTooLarge(u128),
    #[error("serialization failed: {0}")]
    Serialize(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
