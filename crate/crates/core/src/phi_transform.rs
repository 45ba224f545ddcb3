//! The transformed Legendre function φ_T and the multiple-counting function T.
//!
//! Both are signed inclusion–exclusion sums over the squarefree products β of
//! the first `a` primes: a term with `k` prime factors carries the sign
//! (−1)^(k+1). For φ_T the summand is the carry indicator
//! ⌊(M₁ mod β + M₂ mod β)/β⌋, which vanishes once β > M₁ + M₂, and every
//! multiple of such a β is larger still. The enumeration therefore walks only
//! the squarefree numbers `<= M₁ + M₂`, never forming a product that exceeds
//! the bound.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::legendre_phi::{isqrt, phi, PhiCache};
use crate::primes::PrimeTable;

/// Largest prime count accepted by [`phi_t_naive`] (2^a − 1 subsets).
pub const NAIVE_MAX_PRIMES: usize = 20;

/// One denominator β = p_{i₁}·…·p_{i_k} with distinct increasing factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SquarefreeTerm {
    pub beta: u64,
    pub factors: Vec<u64>,
}

impl SquarefreeTerm {
    /// Number of prime factors.
    #[inline]
    pub fn k(&self) -> usize {
        self.factors.len()
    }

    /// (−1)^(k+1): singles +1, pairs −1, triples +1, ...
    #[inline]
    pub fn sign(&self) -> i64 {
        sign_of(self.k())
    }
}

#[inline]
fn sign_of(k: usize) -> i64 {
    if k % 2 == 1 {
        1
    } else {
        -1
    }
}

/// H = m mod β.
pub fn residue_h(m: u64, beta: u64) -> Result<u64> {
    if beta == 0 {
        return Err(Error::ZeroModulus);
    }
    Ok(m % beta)
}

/// ⌊(M₁ mod β + M₂ mod β)/β⌋, which is always 0 or 1.
pub fn carry_term(m1: u64, m2: u64, beta: u64) -> Result<u8> {
    if beta == 0 {
        return Err(Error::ZeroModulus);
    }
    Ok(carry(m1, m2, beta))
}

#[inline]
fn carry(m1: u64, m2: u64, beta: u64) -> u8 {
    // r1 + r2 < 2β can overflow u64 for β near 2^64; compare without adding.
    let (r1, r2) = (m1 % beta, m2 % beta);
    u8::from(r1 >= beta - r2)
}

/// Depth-first walk over every squarefree product of `primes` that is
/// `<= bound`, calling `visit(beta, k)` in preorder.
fn walk_squarefree<F: FnMut(u64, usize)>(primes: &[u64], bound: u64, visit: &mut F) {
    fn go<F: FnMut(u64, usize)>(
        primes: &[u64],
        start: usize,
        beta: u64,
        k: usize,
        bound: u64,
        visit: &mut F,
    ) {
        let room = bound / beta;
        for i in start..primes.len() {
            let p = primes[i];
            if p > room {
                break;
            }
            let next = beta * p;
            visit(next, k + 1);
            go(primes, i + 1, next, k + 1, bound, visit);
        }
    }
    go(primes, 0, 1, 0, bound, visit);
}

/// Iterator over the squarefree products of the first `a` primes that do not
/// exceed `bound`, in depth-first order over increasing prime indices
/// (2, 6, 30, 10, 3, 15, 5 for the primes {2, 3, 5} and bound 30).
#[derive(Debug, Clone)]
pub struct SquarefreeTerms<'t> {
    primes: &'t [u64],
    bound: u64,
    path: Vec<usize>,
    beta: u64,
    done: bool,
}

impl<'t> SquarefreeTerms<'t> {
    fn new(primes: &'t [u64], bound: u64) -> Self {
        SquarefreeTerms {
            primes,
            bound,
            path: Vec::new(),
            beta: 1,
            done: false,
        }
    }

    #[inline]
    fn fits(&self, idx: usize) -> bool {
        idx < self.primes.len() && self.primes[idx] <= self.bound / self.beta
    }
}

impl Iterator for SquarefreeTerms<'_> {
    type Item = SquarefreeTerm;

    fn next(&mut self) -> Option<SquarefreeTerm> {
        if self.done {
            return None;
        }
        let mut candidate = self.path.last().map_or(0, |&j| j + 1);
        loop {
            if self.fits(candidate) {
                self.path.push(candidate);
                self.beta *= self.primes[candidate];
                return Some(SquarefreeTerm {
                    beta: self.beta,
                    factors: self.path.iter().map(|&i| self.primes[i]).collect(),
                });
            }
            // Primes increase, so no later sibling fits either: backtrack.
            match self.path.pop() {
                Some(j) => {
                    self.beta /= self.primes[j];
                    candidate = j + 1;
                }
                None => {
                    self.done = true;
                    return None;
                }
            }
        }
    }
}

/// Every product of a non-empty subset of the first `a` primes that is
/// `<= bound`, each exactly once.
pub fn enumerate_squarefree_terms(
    a: usize,
    bound: u64,
    table: &PrimeTable,
) -> Result<SquarefreeTerms<'_>> {
    Ok(SquarefreeTerms::new(table.first(a)?, bound))
}

/// Value of φ_T together with the number of denominators visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhiTStats {
    pub value: i64,
    pub terms: u64,
}

/// φ_T(M₁, M₂, a): Σ (−1)^(k+1) ⌊(M₁ mod β + M₂ mod β)/β⌋ over the
/// squarefree products β of the first `a` primes.
pub fn phi_t(m1: u64, m2: u64, a: usize, table: &PrimeTable) -> Result<i64> {
    phi_t_stats(m1, m2, a, table).map(|s| s.value)
}

pub fn phi_t_stats(m1: u64, m2: u64, a: usize, table: &PrimeTable) -> Result<PhiTStats> {
    let primes = table.first(a)?;
    let bound = m1.checked_add(m2).ok_or(Error::Overflow {
        what: "M1 + M2",
        value: m1 as u128 + m2 as u128,
    })?;
    let mut value = 0i64;
    let mut terms = 0u64;
    walk_squarefree(primes, bound, &mut |beta, k| {
        terms += 1;
        if carry(m1, m2, beta) == 1 {
            value += sign_of(k);
        }
    });
    Ok(PhiTStats { value, terms })
}

/// φ_T straight from the definition: all 2^a − 1 subsets, products in u128,
/// no pruning.
pub fn phi_t_naive(m1: u64, m2: u64, a: usize, table: &PrimeTable) -> Result<i64> {
    if a > NAIVE_MAX_PRIMES {
        return Err(Error::GuardExceeded {
            what: "phi_t_naive prime count",
            value: a as u64,
            guard: NAIVE_MAX_PRIMES as u64,
        });
    }
    let primes = table.first(a)?;
    let (m1, m2) = (m1 as u128, m2 as u128);
    let mut total = 0i64;
    for mask in 1u32..(1u32 << a) {
        let beta: u128 = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &p)| p as u128)
            .product();
        let c = (m1 % beta + m2 % beta) / beta;
        total += sign_of(mask.count_ones() as usize) * c as i64;
    }
    Ok(total)
}

/// Σ (−1)^(k+1) ⌊m/β⌋ over the squarefree products β of the first `a`
/// primes; terms with β > m are zero and skipped.
pub fn signed_floor_sum(m: u64, a: usize, table: &PrimeTable) -> Result<i64> {
    let primes = table.first(a)?;
    let mut total = 0i64;
    walk_squarefree(primes, m, &mut |beta, k| {
        total += sign_of(k) * (m / beta) as i64;
    });
    Ok(total)
}

/// Whether [`multiple_count_t`] enforces ⌊√N⌋ <= M < (⌊√N⌋ + 1)².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangeCheck {
    #[default]
    Enforce,
    /// Exploratory use: M − φ(M, π(⌊√N⌋)) is well defined for every M.
    Unchecked,
}

/// T(M) = M − φ(M, π(⌊√N⌋)), the count of integers in `1..=M` divisible by
/// at least one prime `<= ⌊√N⌋`. `sqrt_n` is ⌊√N⌋ itself.
pub fn multiple_count_t(
    sqrt_n: u64,
    m: u64,
    table: &PrimeTable,
    cache: &mut PhiCache,
    check: RangeCheck,
) -> Result<u64> {
    if check == RangeCheck::Enforce {
        let hi = (sqrt_n as u128 + 1) * (sqrt_n as u128 + 1);
        if (m as u128) < sqrt_n as u128 || m as u128 >= hi {
            return Err(Error::CountingRange {
                sqrt_n,
                m,
                lo: sqrt_n,
                hi: hi.min(u64::MAX as u128) as u64,
            });
        }
    }
    let a = table.pi(sqrt_n)? as usize;
    Ok(m - phi(m, a, table, cache)?)
}

/// Convenience for callers holding N rather than ⌊√N⌋.
pub fn multiple_count_t_of(
    n_big: u64,
    m: u64,
    table: &PrimeTable,
    cache: &mut PhiCache,
    check: RangeCheck,
) -> Result<u64> {
    multiple_count_t(isqrt(n_big), m, table, cache, check)
}

/// One line of a [`TermBreakdown`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BreakdownTerm {
    pub term: SquarefreeTerm,
    pub residue_m1: u64,
    pub residue_m2: u64,
    pub carry: u8,
    pub signed_value: i64,
}

/// φ_T(M₁, M₂, a) expanded term by term, ordered by factor count and then
/// lexicographically by factors (2, 3, 5, 6, 10, 15, 30 for {2, 3, 5}).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermBreakdown {
    pub m1: u64,
    pub m2: u64,
    pub a: usize,
    pub terms: Vec<BreakdownTerm>,
    pub total: i64,
}

pub fn breakdown(m1: u64, m2: u64, a: usize, table: &PrimeTable) -> Result<TermBreakdown> {
    let bound = m1.checked_add(m2).ok_or(Error::Overflow {
        what: "M1 + M2",
        value: m1 as u128 + m2 as u128,
    })?;
    let mut terms: Vec<BreakdownTerm> = enumerate_squarefree_terms(a, bound, table)?
        .map(|term| {
            let c = carry(m1, m2, term.beta);
            BreakdownTerm {
                residue_m1: m1 % term.beta,
                residue_m2: m2 % term.beta,
                carry: c,
                signed_value: term.sign() * c as i64,
                term,
            }
        })
        .collect();
    terms.sort_by(|x, y| (x.term.k(), &x.term.factors).cmp(&(y.term.k(), &y.term.factors)));
    let total = terms.iter().map(|t| t.signed_value).sum();
    Ok(TermBreakdown {
        m1,
        m2,
        a,
        terms,
        total,
    })
}
