//! Sieve of Eratosthenes and the exact prime-counting oracle.
//!
//! A [`PrimeTable`] is immutable once built and answers π(x) for every
//! `x <= limit` by binary search over the ordered prime list. Queries past
//! the limit are errors; the table is never grown in place.

use crate::error::{Error, Result};

/// Largest limit [`sieve_primes`] accepts (one byte of sieve state per integer).
pub const DEFAULT_LIMIT_BUDGET: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

/// Sieves all primes `<= limit` under [`DEFAULT_LIMIT_BUDGET`].
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    PrimeTable::with_budget(limit, DEFAULT_LIMIT_BUDGET)
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self> {
        sieve_primes(limit)
    }

    pub fn with_budget(limit: u64, budget: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::ZeroLimit);
        }
        if limit > budget || usize::try_from(limit).is_err() {
            return Err(Error::LimitOverBudget { limit, budget });
        }
        let len = limit as usize + 1;
        let mut composite = vec![false; len];
        composite[0] = true;
        composite[1] = true;
        let mut i = 2usize;
        while i * i < len {
            if !composite[i] {
                for multiple in (i * i..len).step_by(i) {
                    composite[multiple] = true;
                }
            }
            i += 1;
        }
        let primes = composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(p, _)| p as u64)
            .collect();
        Ok(PrimeTable { limit, primes })
    }

    #[inline]
    pub fn limit(&self) -> u64 {
        self.limit
    }

    #[inline]
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Number of primes `<= x`.
    pub fn pi(&self, x: u64) -> Result<u64> {
        if x > self.limit {
            return Err(Error::OutOfRange {
                x,
                limit: self.limit,
            });
        }
        Ok(self.primes.partition_point(|&p| p <= x) as u64)
    }

    /// The first `a` primes, in increasing order.
    pub fn first(&self, a: usize) -> Result<&[u64]> {
        self.primes.get(..a).ok_or(Error::NotEnoughPrimes {
            requested: a,
            available: self.primes.len(),
        })
    }

    pub fn is_prime(&self, x: u64) -> Result<bool> {
        if x > self.limit {
            return Err(Error::OutOfRange {
                x,
                limit: self.limit,
            });
        }
        Ok(self.primes.binary_search(&x).is_ok())
    }
}

/// Free-function form of [`PrimeTable::pi`].
pub fn pi(x: u64, table: &PrimeTable) -> Result<u64> {
    table.pi(x)
}
