//! Invariant suites at reduced bounds, one pass/fail outcome per suite.

use std::time::Instant;

use crate::error::Result;
use crate::identity::{
    evaluate_theorem1, section2_identity_check, verify_range, Corollary1, Engine, EngineSelection,
    IdentityContext, IdentityRecord,
};
use crate::legendre_phi::{phi, phi_bruteforce, pi_via_legendre, PhiCache};
use crate::phi_transform::{multiple_count_t, phi_t, phi_t_naive, signed_floor_sum, RangeCheck};
use crate::primes::sieve_primes;

#[derive(Debug, Clone, Copy, Default)]
pub struct SelftestOptions {
    /// Smaller bounds throughout.
    pub quick: bool,
    /// Perturbs φ_T by one inside the identity suite; the run must then fail.
    pub inject_fault: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

struct Bounds {
    trial_division: u64,
    phi_grid_x: u64,
    phi_grid_a: usize,
    legendre_pi: u64,
    naive_n: u64,
    section1_root: u64,
    section2_n: u64,
    theorem_n: u64,
}

impl Bounds {
    fn new(quick: bool) -> Self {
        if quick {
            Bounds {
                trial_division: 1_000,
                phi_grid_x: 300,
                phi_grid_a: 6,
                legendre_pi: 10_000,
                naive_n: 20,
                section1_root: 10,
                section2_n: 50,
                theorem_n: 50,
            }
        } else {
            Bounds {
                trial_division: 10_000,
                phi_grid_x: 2_000,
                phi_grid_a: 10,
                legendre_pi: 100_000,
                naive_n: 40,
                section1_root: 20,
                section2_n: 200,
                theorem_n: 200,
            }
        }
    }
}

fn outcome(name: &'static str, failures: u64, checked: u64) -> SuiteOutcome {
    SuiteOutcome {
        name,
        passed: failures == 0,
        detail: format!("checked={checked} failures={failures}"),
    }
}

/// Runs every suite and returns their outcomes in a fixed order.
pub fn run_selftest(opts: SelftestOptions) -> Result<Vec<SuiteOutcome>> {
    let b = Bounds::new(opts.quick);
    let started = Instant::now();
    let mut out = Vec::new();

    let table = sieve_primes(b.legendre_pi.max((b.theorem_n + 1) * (b.theorem_n + 1)))?;
    let mut cache = PhiCache::new();

    let mut bad = 0;
    for x in 2..=b.trial_division {
        let prime = (2..).take_while(|d| d * d <= x).all(|d| x % d != 0);
        if (table.pi(x)? - table.pi(x - 1)? == 1) != prime {
            bad += 1;
        }
    }
    out.push(outcome(
        "sieve_vs_trial_division",
        bad,
        b.trial_division - 1,
    ));

    let mut bad = 0;
    let mut checked = 0;
    for a in 0..=b.phi_grid_a {
        for x in 0..=b.phi_grid_x {
            checked += 1;
            if phi(x, a, &table, &mut cache)? != phi_bruteforce(x, a, &table)? {
                bad += 1;
            }
        }
    }
    out.push(outcome("phi_vs_bruteforce", bad, checked));

    let mut bad = 0;
    for m in 2..=b.legendre_pi {
        if pi_via_legendre(m, &table, &mut cache)? != table.pi(m)? {
            bad += 1;
        }
    }
    out.push(outcome("pi_via_legendre_vs_sieve", bad, b.legendre_pi - 1));

    let mut bad = 0;
    for n in 1..=b.naive_n {
        let a = table.pi(n)? as usize;
        if phi_t(n * n, 2 * n, a, &table)? != phi_t_naive(n * n, 2 * n, a, &table)? {
            bad += 1;
        }
    }
    out.push(outcome("phi_t_vs_naive", bad, b.naive_n));

    let mut bad = 0;
    let mut checked = 0;
    for root in 1..=b.section1_root {
        let a = table.pi(root)? as usize;
        for m in root..(root + 1) * (root + 1) {
            checked += 1;
            let t = multiple_count_t(root, m, &table, &mut cache, RangeCheck::Enforce)?;
            if t as i64 != signed_floor_sum(m, a, &table)? {
                bad += 1;
            }
        }
    }
    out.push(outcome("t_as_signed_floor_sum", bad, checked));

    let mut bad = 0;
    for n in 1..=b.section2_n {
        if !section2_identity_check(n, &table, &mut cache)?.holds {
            bad += 1;
        }
    }
    out.push(outcome("t_difference_identity", bad, b.section2_n));

    let ctx = IdentityContext::new(b.theorem_n, EngineSelection::Both)?;
    let summary = verify_range(1, b.theorem_n, EngineSelection::Both, &ctx)?;
    let mut failures = summary.failures.len() as u64;
    if opts.inject_fault {
        let r = evaluate_theorem1(b.theorem_n, Engine::Sieve, &ctx, &mut cache)?;
        let tampered = IdentityRecord::from_counts(
            r.n,
            r.pi_n2,
            r.pi_next2,
            r.pi_n,
            r.pi_2n,
            r.phi_t + 1,
            r.engine,
        );
        failures += u64::from(!tampered.holds);
    }
    out.push(outcome("identity_both_engines", failures, summary.checked));
    out.push(outcome(
        "engine_cross_check",
        summary.mismatches.len() as u64,
        summary.checked,
    ));

    let bad = summary
        .records
        .iter()
        .filter(|r| !Corollary1::from_record(r).passed())
        .count() as u64;
    out.push(outcome(
        "corollary1_equivalence",
        bad,
        summary.records.len() as u64,
    ));

    log_elapsed(&mut out, started);
    Ok(out)
}

fn log_elapsed(out: &mut [SuiteOutcome], started: Instant) {
    if let Some(last) = out.last_mut() {
        last.detail.push_str(&format!(
            " total_elapsed={:.3}s",
            started.elapsed().as_secs_f64()
        ));
    }
}
