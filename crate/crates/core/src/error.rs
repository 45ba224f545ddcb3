use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sieve limit must be at least 1")]
    ZeroLimit,

    #[error("sieve limit {limit} exceeds the memory budget of {budget}")]
    LimitOverBudget { limit: u64, budget: u64 },

    #[error("π({x}) requested but the prime table only reaches {limit}")]
    OutOfRange { x: u64, limit: u64 },

    #[error("{requested} primes requested but the table holds only {available}")]
    NotEnoughPrimes { requested: usize, available: usize },

    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("{what}: argument {value} exceeds the guard of {guard}")]
    GuardExceeded {
        what: &'static str,
        value: u64,
        guard: u64,
    },

    #[error("argument {m} is outside [{lo}, {hi}) required for T with ⌊√N⌋ = {sqrt_n}")]
    CountingRange {
        sqrt_n: u64,
        m: u64,
        lo: u64,
        hi: u64,
    },

    #[error("empty range: from {lo} to {hi}")]
    EmptyRange { lo: u64, hi: u64 },

    #[error("argument {0} is invalid; n must be at least 1")]
    ZeroN(u64),

    #[error("{value} overflows 64-bit arithmetic ({what})")]
    Overflow { what: &'static str, value: u128 },

    #[error("no prime table for the {0} engine in this context")]
    EngineUnavailable(&'static str),

    #[error("pruned φ_T = {pruned} disagrees with subset oracle {naive} at n = {n}")]
    ShadowMismatch { n: u64, pruned: i64, naive: i64 },
}
