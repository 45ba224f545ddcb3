//! Legendre's function φ(x, a): the number of integers in `1..=x` divisible
//! by none of the first `a` primes.
//!
//! The recursion φ(x, a) = φ(x, a−1) − φ(⌊x/p_a⌋, a−1) is evaluated with its
//! first branch unrolled,
//!
//! ```text
//! φ(x, a) = x − Σ_{i=1..a} φ(⌊x/p_i⌋, i−1)
//! ```
//!
//! so the stack depth is bounded by the number of prime factors of the
//! denominators (at most log₂ x) rather than by `a`. Two exact base cases
//! cut the tree: φ(0, a) = 0, and φ(x, a) = 1 whenever 1 ≤ x ≤ p_a, since
//! every integer in `2..=x` then has a prime factor among the first `a`
//! primes. Nothing else is truncated, so every (x, a) is answered exactly.
//!
//! [`pi_via_legendre`] turns φ into a second prime-counting route that needs
//! only the primes up to ⌊√M⌋.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::primes::PrimeTable;

/// Memo entries are only kept for `x` below this value by default.
pub const DEFAULT_MEMO_THRESHOLD: u64 = 100_000;
/// Default cap on the number of memo entries.
pub const DEFAULT_MEMO_BUDGET: usize = 1 << 22;
/// Largest `x` accepted by [`phi_bruteforce`].
pub const BRUTEFORCE_GUARD: u64 = 1_000_000;

/// Memo for φ keyed on `(x, a)`. Purely a cache: clearing it never changes
/// a result.
#[derive(Debug, Clone)]
pub struct PhiCache {
    memo: HashMap<(u64, u32), u64>,
    threshold: u64,
    budget: usize,
}

impl Default for PhiCache {
    fn default() -> Self {
        Self::new()
    }
}

impl PhiCache {
    pub fn new() -> Self {
        Self::with_limits(DEFAULT_MEMO_THRESHOLD, DEFAULT_MEMO_BUDGET)
    }

    /// `threshold`: only `x < threshold` is memoised. `budget`: maximum entries.
    pub fn with_limits(threshold: u64, budget: usize) -> Self {
        PhiCache {
            memo: HashMap::new(),
            threshold,
            budget,
        }
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    pub fn clear(&mut self) {
        self.memo.clear();
    }

    /// Iterates the cached `((x, a), φ(x, a))` entries.
    pub fn entries(&self) -> impl Iterator<Item = ((u64, usize), u64)> + '_ {
        self.memo.iter().map(|(&(x, a), &v)| ((x, a as usize), v))
    }

    #[inline]
    fn get(&self, x: u64, a: usize) -> Option<u64> {
        if x < self.threshold {
            self.memo.get(&(x, a as u32)).copied()
        } else {
            None
        }
    }

    #[inline]
    fn put(&mut self, x: u64, a: usize, value: u64) {
        if x < self.threshold && self.memo.len() < self.budget {
            self.memo.insert((x, a as u32), value);
        }
    }
}

/// φ(x, a) over the first `a` primes of `table`.
pub fn phi(x: u64, a: usize, table: &PrimeTable, cache: &mut PhiCache) -> Result<u64> {
    let primes = table.first(a)?;
    Ok(phi_rec(x, primes, cache))
}

fn phi_rec(x: u64, primes: &[u64], cache: &mut PhiCache) -> u64 {
    let a = primes.len();
    if a == 0 {
        return x;
    }
    if x == 0 {
        return 0;
    }
    if x <= primes[a - 1] {
        return 1;
    }
    if let Some(v) = cache.get(x, a) {
        return v;
    }

    let mut result = x;
    for i in 0..a {
        let q = x / primes[i];
        if q == 0 {
            break;
        }
        // Term i is φ(q, i). Once q <= p_i every remaining term with q >= 1
        // equals 1; count them in one step.
        if i > 0 && q <= primes[i - 1] {
            let remaining = primes[i..].partition_point(|&p| p <= x);
            result -= remaining as u64;
            break;
        }
        result -= phi_rec(q, &primes[..i], cache);
    }

    cache.put(x, a, result);
    result
}

/// Counts `1 <= m <= x` coprime to the first `a` primes by trial division.
pub fn phi_bruteforce(x: u64, a: usize, table: &PrimeTable) -> Result<u64> {
    if x > BRUTEFORCE_GUARD {
        return Err(Error::GuardExceeded {
            what: "phi_bruteforce",
            value: x,
            guard: BRUTEFORCE_GUARD,
        });
    }
    let primes = table.first(a)?;
    Ok((1..=x)
        .filter(|m| primes.iter().all(|p| m % p != 0))
        .count() as u64)
}

/// ⌊√m⌋, checked so that r² <= m < (r+1)².
pub fn isqrt(m: u64) -> u64 {
    let r = m.isqrt();
    debug_assert!(r.checked_mul(r).is_some_and(|sq| sq <= m));
    debug_assert!((r + 1).checked_mul(r + 1).is_none_or(|sq| sq > m));
    r
}

/// π(m) by Legendre's formula, π(m) = φ(m, π(⌊√m⌋)) + π(⌊√m⌋) − 1.
///
/// Only primes up to ⌊√m⌋ are read from `table`.
pub fn pi_via_legendre(m: u64, table: &PrimeTable, cache: &mut PhiCache) -> Result<u64> {
    if m < 2 {
        return Ok(0);
    }
    let root = isqrt(m);
    let a = table.pi(root)?;
    let survivors = phi(m, a as usize, table, cache)?;
    Ok(survivors + a - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::sieve_primes;

    #[test]
    fn phi_with_no_primes_is_identity() {
        let t = sieve_primes(10).unwrap();
        let mut c = PhiCache::new();
        for x in [0, 1, 17, 1_000_000_007] {
            assert_eq!(phi(x, 0, &t, &mut c).unwrap(), x);
        }
    }

    #[test]
    fn phi_small_values() {
        let t = sieve_primes(100).unwrap();
        let mut c = PhiCache::new();
        // 1, 7, 11
        assert_eq!(phi(12, 3, &t, &mut c).unwrap(), 3);
        assert_eq!(phi_bruteforce(12, 3, &t).unwrap(), 3);
        // π(36) − π(6) + 1
        assert_eq!(phi(36, 3, &t, &mut c).unwrap(), 9);
        // 1, the twelve primes 7..=47, and 49
        assert_eq!(phi_bruteforce(49, 3, &t).unwrap(), 14);
        assert_eq!(phi(49, 3, &t, &mut c).unwrap(), 14);
        // Legendre's formula needs every prime <= √49
        assert_eq!(phi(49, 4, &t, &mut c).unwrap(), 12);
        assert_eq!(phi_bruteforce(1, 5, &t).unwrap(), 1);
        assert_eq!(phi_bruteforce(0, 5, &t).unwrap(), 0);
    }

    #[test]
    fn too_many_primes_requested() {
        let t = sieve_primes(10).unwrap();
        let mut c = PhiCache::new();
        assert!(matches!(
            phi(100, 5, &t, &mut c),
            Err(Error::NotEnoughPrimes {
                requested: 5,
                available: 4
            })
        ));
        assert!(phi_bruteforce(100, 5, &t).is_err());
    }

    #[test]
    fn bruteforce_guard() {
        let t = sieve_primes(10).unwrap();
        assert!(matches!(
            phi_bruteforce(BRUTEFORCE_GUARD + 1, 1, &t),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn pi_via_legendre_small() {
        let t = sieve_primes(11).unwrap();
        let mut c = PhiCache::new();
        assert_eq!(pi_via_legendre(49, &t, &mut c).unwrap(), 15);
        assert_eq!(pi_via_legendre(4, &t, &mut c).unwrap(), 2);
        assert_eq!(pi_via_legendre(2, &t, &mut c).unwrap(), 1);
        assert_eq!(pi_via_legendre(1, &t, &mut c).unwrap(), 0);
        assert_eq!(pi_via_legendre(0, &t, &mut c).unwrap(), 0);
        assert_eq!(pi_via_legendre(121, &t, &mut c).unwrap(), 30);
    }

    #[test]
    fn pi_via_legendre_needs_root_in_table() {
        let t = sieve_primes(10).unwrap();
        let mut c = PhiCache::new();
        assert!(matches!(
            pi_via_legendre(144, &t, &mut c),
            Err(Error::OutOfRange { x: 12, limit: 10 })
        ));
    }

    #[test]
    fn cache_does_not_change_results() {
        let t = sieve_primes(1_000).unwrap();
        let mut warm = PhiCache::new();
        let mut none = PhiCache::with_limits(0, 0);
        for (x, a) in [(100_000, 30), (99_999, 10), (54_321, 65), (1 << 20, 100)] {
            let v = phi(x, a, &t, &mut warm).unwrap();
            assert_eq!(v, phi(x, a, &t, &mut none).unwrap());
            assert_eq!(v, phi(x, a, &t, &mut warm).unwrap());
        }
        assert!(none.is_empty());
        for ((x, a), v) in warm.entries().filter(|((x, _), _)| *x <= 5_000) {
            assert_eq!(v, phi_bruteforce(x, a, &t).unwrap());
        }
    }

    #[test]
    fn isqrt_edges() {
        for m in [0u64, 1, 2, 3, 4, 15, 16, 17, u64::MAX, u64::MAX - 1] {
            let r = isqrt(m);
            assert!(r as u128 * r as u128 <= m as u128);
            assert!((r as u128 + 1) * (r as u128 + 1) > m as u128);
        }
    }
}
