//! Per-n evaluation of
//!
//! ```text
//! π((n+1)²) − π(n²) = π(2n) − π(n) + 1 − φ_T(n², 2n, π(n))
//! ```
//!
//! under two independent prime-counting engines, plus the supporting
//! T-difference identity, the Corollary-1 equivalence and the B_t/P_t series.
//!
//! The sieve engine reads every count off a table sieved to (n+1)². The
//! Legendre engine sieves only to 2n and obtains π(n²) and π((n+1)²) from
//! Legendre's formula with the primes `<= n`; for the latter it counts
//! π(n² + 2n), since √(n² + 2n) < n + 1 and (n+1)² is never prime.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::legendre_phi::{phi, pi_via_legendre, PhiCache};
use crate::phi_transform::{multiple_count_t, phi_t, phi_t_naive, phi_t_stats, RangeCheck};
use crate::primes::PrimeTable;

/// Default largest π(n) for which the subset oracle shadows every φ_T.
pub const DEFAULT_SHADOW_THRESHOLD: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Sieve,
    Legendre,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Sieve => "sieve",
            Engine::Legendre => "legendre",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineSelection {
    #[default]
    Sieve,
    Legendre,
    Both,
}

impl EngineSelection {
    pub fn engines(self) -> &'static [Engine] {
        match self {
            EngineSelection::Sieve => &[Engine::Sieve],
            EngineSelection::Legendre => &[Engine::Legendre],
            EngineSelection::Both => &[Engine::Sieve, Engine::Legendre],
        }
    }

    fn uses(self, engine: Engine) -> bool {
        self.engines().contains(&engine)
    }
}

/// Prime tables sized for every n up to `n_max`, one per selected engine.
#[derive(Debug, Clone)]
pub struct IdentityContext {
    n_max: u64,
    sieve: Option<PrimeTable>,
    small: Option<PrimeTable>,
    shadow_threshold: usize,
}

impl IdentityContext {
    pub fn new(n_max: u64, selection: EngineSelection) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::ZeroN(0));
        }
        let sieve = if selection.uses(Engine::Sieve) {
            let next = n_max.checked_add(1).and_then(|m| m.checked_mul(m));
            let limit = next.ok_or(Error::Overflow {
                what: "(n + 1)^2",
                value: (n_max as u128 + 1) * (n_max as u128 + 1),
            })?;
            Some(PrimeTable::new(limit)?)
        } else {
            None
        };
        let small = if selection.uses(Engine::Legendre) {
            let limit = n_max.checked_mul(2).ok_or(Error::Overflow {
                what: "2n",
                value: n_max as u128 * 2,
            })?;
            Some(PrimeTable::new(limit)?)
        } else {
            None
        };
        Ok(IdentityContext {
            n_max,
            sieve,
            small,
            shadow_threshold: DEFAULT_SHADOW_THRESHOLD,
        })
    }

    /// Sets the largest π(n) shadowed by the subset oracle (at most 20).
    pub fn with_shadow_threshold(mut self, threshold: usize) -> Result<Self> {
        if threshold > crate::phi_transform::NAIVE_MAX_PRIMES {
            return Err(Error::GuardExceeded {
                what: "naive shadow threshold",
                value: threshold as u64,
                guard: crate::phi_transform::NAIVE_MAX_PRIMES as u64,
            });
        }
        self.shadow_threshold = threshold;
        Ok(self)
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn shadow_threshold(&self) -> usize {
        self.shadow_threshold
    }

    /// The table backing `engine`, if that engine was selected.
    pub fn table(&self, engine: Engine) -> Option<&PrimeTable> {
        match engine {
            Engine::Sieve => self.sieve.as_ref(),
            Engine::Legendre => self.small.as_ref(),
        }
    }

    /// Any table; every one of them covers the primes `<= n_max`.
    pub fn any_table(&self) -> &PrimeTable {
        self.small
            .as_ref()
            .or(self.sieve.as_ref())
            .expect("context holds at least one table")
    }

    fn require(&self, engine: Engine) -> Result<&PrimeTable> {
        self.table(engine)
            .ok_or(Error::EngineUnavailable(engine.name()))
    }
}

/// The six quantities for one n, both sides, and whether they agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityRecord {
    pub n: u64,
    pub pi_n2: u64,
    pub pi_next2: u64,
    pub pi_n: u64,
    pub pi_2n: u64,
    pub phi_t: i64,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
    pub engine: Engine,
}

impl IdentityRecord {
    /// Builds a record; `lhs`, `rhs` and `holds` are derived from the counts.
    pub fn from_counts(
        n: u64,
        pi_n2: u64,
        pi_next2: u64,
        pi_n: u64,
        pi_2n: u64,
        phi_t: i64,
        engine: Engine,
    ) -> Self {
        let lhs = pi_next2 as i64 - pi_n2 as i64;
        let rhs = pi_2n as i64 - pi_n as i64 + 1 - phi_t;
        IdentityRecord {
            n,
            pi_n2,
            pi_next2,
            pi_n,
            pi_2n,
            phi_t,
            lhs,
            rhs,
            holds: lhs == rhs,
            engine,
        }
    }

    /// π((n+1)²) − π(n²).
    pub fn legendre_gap(&self) -> i64 {
        self.lhs
    }

    /// B_t(n) = π(2n) − π(n).
    pub fn bertrand_count(&self) -> i64 {
        self.pi_2n as i64 - self.pi_n as i64
    }

    /// True when all five counts agree with `other`, whatever the engines.
    pub fn same_counts(&self, other: &IdentityRecord) -> bool {
        (
            self.n,
            self.pi_n2,
            self.pi_next2,
            self.pi_n,
            self.pi_2n,
            self.phi_t,
        ) == (
            other.n,
            other.pi_n2,
            other.pi_next2,
            other.pi_n,
            other.pi_2n,
            other.phi_t,
        )
    }
}

fn square_terms(n: u64) -> Result<(u64, u64)> {
    let overflow = || Error::Overflow {
        what: "n^2 + 2n",
        value: n as u128 * n as u128 + 2 * n as u128,
    };
    let n2 = n.checked_mul(n).ok_or_else(overflow)?;
    let n2_2n = n2.checked_add(2 * n).ok_or_else(overflow)?;
    Ok((n2, n2_2n))
}

fn evaluate_with_terms(
    n: u64,
    engine: Engine,
    ctx: &IdentityContext,
    cache: &mut PhiCache,
) -> Result<(IdentityRecord, u64)> {
    if n == 0 {
        return Err(Error::ZeroN(n));
    }
    let table = ctx.require(engine)?;
    let (n2, n2_2n) = square_terms(n)?;
    let pi_n = table.pi(n)?;
    let pi_2n = table.pi(2 * n)?;
    let (pi_n2, pi_next2) = match engine {
        Engine::Sieve => (table.pi(n2)?, table.pi(n2_2n + 1)?),
        Engine::Legendre => {
            let pi_n2 = pi_via_legendre(n2, table, cache)?;
            // √(n² + 2n) < n + 1, so π(n) primes suffice.
            let pi_next2 = phi(n2_2n, pi_n as usize, table, cache)? + pi_n - 1;
            (pi_n2, pi_next2)
        }
    };

    let a = pi_n as usize;
    let stats = phi_t_stats(n2, 2 * n, a, table)?;
    if a <= ctx.shadow_threshold {
        let naive = phi_t_naive(n2, 2 * n, a, table)?;
        if naive != stats.value {
            return Err(Error::ShadowMismatch {
                n,
                pruned: stats.value,
                naive,
            });
        }
    }

    let record = IdentityRecord::from_counts(n, pi_n2, pi_next2, pi_n, pi_2n, stats.value, engine);
    Ok((record, stats.terms))
}

/// Evaluates both sides of the identity at `n` with the chosen engine.
pub fn evaluate_theorem1(
    n: u64,
    engine: Engine,
    ctx: &IdentityContext,
    cache: &mut PhiCache,
) -> Result<IdentityRecord> {
    evaluate_with_terms(n, engine, ctx, cache).map(|(r, _)| r)
}

/// Two engines that disagreed on some count at the same n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EngineMismatch {
    pub sieve: IdentityRecord,
    pub legendre: IdentityRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeSummary {
    pub checked: u64,
    pub failures: Vec<IdentityRecord>,
    pub mismatches: Vec<EngineMismatch>,
    /// Every record, in ascending n (engine order within an n).
    #[serde(skip)]
    pub records: Vec<IdentityRecord>,
    pub elapsed: Duration,
    /// Largest number of φ_T denominators visited for a single n, and that n.
    pub max_terms: u64,
    pub max_terms_n: u64,
}

impl RangeSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.mismatches.is_empty()
    }
}

fn check_range(lo: u64, hi: u64) -> Result<()> {
    if lo == 0 {
        return Err(Error::ZeroN(lo));
    }
    if lo > hi {
        return Err(Error::EmptyRange { lo, hi });
    }
    Ok(())
}

/// Evaluates every n in `lo..=hi` on the current rayon pool. The result is
/// ordered by n whatever the number of workers.
pub fn verify_range(
    lo: u64,
    hi: u64,
    selection: EngineSelection,
    ctx: &IdentityContext,
) -> Result<RangeSummary> {
    check_range(lo, hi)?;
    let start = Instant::now();
    let per_n: Vec<(Vec<IdentityRecord>, u64)> = (lo..=hi)
        .into_par_iter()
        .map_init(PhiCache::new, |cache, n| {
            let mut records = Vec::with_capacity(2);
            let mut terms = 0;
            for &engine in selection.engines() {
                let (record, t) = evaluate_with_terms(n, engine, ctx, cache)?;
                records.push(record);
                terms = terms.max(t);
            }
            Ok((records, terms))
        })
        .collect::<Result<_>>()?;

    let mut summary = RangeSummary {
        checked: hi - lo + 1,
        failures: Vec::new(),
        mismatches: Vec::new(),
        records: Vec::with_capacity(per_n.len() * selection.engines().len()),
        elapsed: Duration::ZERO,
        max_terms: 0,
        max_terms_n: lo,
    };
    for (n, (records, terms)) in (lo..=hi).zip(per_n) {
        if terms > summary.max_terms {
            summary.max_terms = terms;
            summary.max_terms_n = n;
        }
        summary
            .failures
            .extend(records.iter().filter(|r| !r.holds).copied());
        if let [sieve, legendre] = records[..] {
            if !sieve.same_counts(&legendre) {
                summary.mismatches.push(EngineMismatch { sieve, legendre });
            }
        }
        summary.records.extend(records);
    }
    summary.elapsed = start.elapsed();
    Ok(summary)
}

/// Both sides of T_n(n² + 2n) − T_n(n²) = T_n(2n) + Σ± ⌊(H^{n²}_β + H^{2n}_β)/β⌋.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Section2Check {
    pub n: u64,
    pub lhs_t: i64,
    pub rhs_t: i64,
    pub holds: bool,
}

/// Evaluates the T-difference identity at `n`: the left side from two
/// φ-based T values, the right side from T_n(2n) and the signed carry sum.
/// `table` must contain the primes `<= n`.
pub fn section2_identity_check(
    n: u64,
    table: &PrimeTable,
    cache: &mut PhiCache,
) -> Result<Section2Check> {
    if n == 0 {
        return Err(Error::ZeroN(n));
    }
    let (n2, n2_2n) = square_terms(n)?;
    let t_upper = multiple_count_t(n, n2_2n, table, cache, RangeCheck::Enforce)?;
    let t_lower = multiple_count_t(n, n2, table, cache, RangeCheck::Enforce)?;
    let t_2n = multiple_count_t(n, 2 * n, table, cache, RangeCheck::Enforce)?;
    let carries = phi_t(n2, 2 * n, table.pi(n)? as usize, table)?;
    let lhs_t = t_upper as i64 - t_lower as i64;
    let rhs_t = t_2n as i64 + carries;
    Ok(Section2Check {
        n,
        lhs_t,
        rhs_t,
        holds: lhs_t == rhs_t,
    })
}

/// Corollary 1 at a single n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Corollary1 {
    pub n: u64,
    /// π((n+1)²) − π(n²) >= 1.
    pub gap_ge_1: bool,
    /// φ_T(n², 2n, π(n)) <= B_t(n).
    pub bound_holds: bool,
    pub equivalent: bool,
    /// φ_T <= 1 implies gap >= 1 (vacuously true when φ_T > 1).
    pub small_phi_t_implies_gap: bool,
}

impl Corollary1 {
    pub fn from_record(record: &IdentityRecord) -> Self {
        let gap_ge_1 = record.legendre_gap() >= 1;
        let bound_holds = record.phi_t <= record.bertrand_count();
        Corollary1 {
            n: record.n,
            gap_ge_1,
            bound_holds,
            equivalent: gap_ge_1 == bound_holds,
            small_phi_t_implies_gap: record.phi_t > 1 || gap_ge_1,
        }
    }

    pub fn passed(&self) -> bool {
        self.equivalent && self.small_phi_t_implies_gap
    }
}

pub fn corollary1_check(
    n: u64,
    engine: Engine,
    ctx: &IdentityContext,
    cache: &mut PhiCache,
) -> Result<Corollary1> {
    evaluate_theorem1(n, engine, ctx, cache).map(|r| Corollary1::from_record(&r))
}

/// One row of the B_t/P_t series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeriesPoint {
    pub n: u64,
    /// π((n+1)²) − π(n²).
    pub legendre_gap: i64,
    /// B_t(n) = π(2n) − π(n).
    pub bertrand_count: i64,
    /// P_t(n) = φ_T(n², 2n, π(n)).
    pub phi_t: i64,
}

impl SeriesPoint {
    /// gap = B_t + 1 − P_t.
    pub fn consistent(&self) -> bool {
        self.legendre_gap == self.bertrand_count + 1 - self.phi_t
    }
}

impl From<&IdentityRecord> for SeriesPoint {
    fn from(r: &IdentityRecord) -> Self {
        SeriesPoint {
            n: r.n,
            legendre_gap: r.legendre_gap(),
            bertrand_count: r.bertrand_count(),
            phi_t: r.phi_t,
        }
    }
}

/// One [`SeriesPoint`] per n in `lo..=hi`, ascending.
pub fn series(lo: u64, hi: u64, engine: Engine, ctx: &IdentityContext) -> Result<Vec<SeriesPoint>> {
    check_range(lo, hi)?;
    (lo..=hi)
        .into_par_iter()
        .map_init(PhiCache::new, |cache, n| {
            evaluate_theorem1(n, engine, ctx, cache).map(|r| SeriesPoint::from(&r))
        })
        .collect()
}

/// Checks Σ_{n=lo..=hi} gap(n) = π((hi+1)²) − π(lo²) for a contiguous,
/// ascending run of points, against `table` (which must reach (hi+1)²).
pub fn telescoping_check(points: &[SeriesPoint], table: &PrimeTable) -> Result<bool> {
    let (Some(first), Some(last)) = (points.first(), points.last()) else {
        return Ok(true);
    };
    let contiguous = points.windows(2).all(|w| w[1].n == w[0].n + 1);
    let total: i64 = points.iter().map(|p| p.legendre_gap).sum();
    let (lo2, _) = square_terms(first.n)?;
    let (_, hi2_2n) = square_terms(last.n)?;
    let expected = table.pi(hi2_2n + 1)? as i64 - table.pi(lo2)? as i64;
    Ok(contiguous && total == expected)
}

/// Smallest and largest P_t over a series, with the first n attaining each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PtExtremes {
    pub min: i64,
    pub min_n: u64,
    pub max: i64,
    pub max_n: u64,
}

impl PtExtremes {
    pub fn from_points(points: &[SeriesPoint]) -> Option<Self> {
        let first = points.first()?;
        let mut out = PtExtremes {
            min: first.phi_t,
            min_n: first.n,
            max: first.phi_t,
            max_n: first.n,
        };
        for p in &points[1..] {
            if p.phi_t < out.min {
                out.min = p.phi_t;
                out.min_n = p.n;
            }
            if p.phi_t > out.max {
                out.max = p.phi_t;
                out.max_n = p.n;
            }
        }
        Some(out)
    }
}
