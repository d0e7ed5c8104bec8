use thiserror::Error;

/// Errors raised by the algebraic operations of this crate.
///
/// Parse and instance-file problems have their own types in [`crate::expr`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a supported prime (expected a prime between 2 and 13)")]
    InvalidPrime(u32),
    #[error("coefficient kinds differ")]
    KindMismatch,
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("variable index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("operation requires a nonzero input")]
    ZeroInput,
    #[error("need 1 <= m <= n, got m = {m}, n = {n}")]
    ArityViolation { m: usize, n: usize },
    #[error("bad column set: {0}")]
    BadColumnSet(String),
    #[error("{what} has size {size}, above the cap {cap}")]
    ScaleExceeded { what: &'static str, size: u128, cap: u128 },
    #[error("generators are p-dependent")]
    DependentGenerators,
    #[error("g is not irreducible: {0}")]
    NotIrreducible(String),
    #[error("g does not divide the differential gcd")]
    NotADivisorOfDgcd,
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("trial division could not certify a factorization within its bounds")]
    FactorBoundExceeded,
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
