//! Acceptance suite: one PASS/FAIL line per criterion, exact tolerances
//! throughout. Runs without the libtest harness so the lines always print.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use phit_cli::{breakdown_text, run_from, series_csv, EXIT_OK, WORKERS_ENV};
use phit_core::{
    multiple_count_t, phi, phi_bruteforce, phi_t, phi_t_naive, pi_via_legendre,
    section2_identity_check, series, sieve_primes, signed_floor_sum, verify_range, Corollary1,
    Engine, EngineSelection, IdentityContext, IdentityRecord, PhiCache, PtExtremes, RangeCheck,
    SeriesPoint,
};

const BREAKDOWN_BUDGET: Duration = Duration::from_millis(10);
const THEOREM_RANGE: u64 = 2_000;
const THEOREM_BUDGET: Duration = Duration::from_secs(60);
const RANDOM_TRIPLES: usize = 200;
const RANDOM_SEED: u64 = 0x5EED_2008;
const PHI_GRID_X: u64 = 10_000;
const PHI_GRID_A: usize = 10;
const LEGENDRE_PI_MAX: u64 = 1_000_000;
const SECTION1_ROOT_MAX: u64 = 50;
const SECTION2_N_MAX: u64 = 500;
const SERIES_RANGE: u64 = 500;

type Criterion = Box<dyn FnOnce(&mut Vec<IdentityRecord>) -> Outcome>;

struct Outcome {
    passed: bool,
    detail: String,
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: false,
        detail: detail.into(),
    }
}

fn check(cond: bool, detail: String) -> Outcome {
    Outcome {
        passed: cond,
        detail,
    }
}

/// Worked example n = 6, term by term.
fn ac1_worked_example() -> Outcome {
    let started = Instant::now();
    let (text, holds) = match breakdown_text(6, 15) {
        Ok(v) => v,
        Err(e) => return fail(e.message),
    };
    let elapsed = started.elapsed();

    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_from(["phit", "breakdown", "--n", "6"], &mut out, &mut err);
    let cli_text = String::from_utf8_lossy(&out).into_owned();

    let expected_terms = [
        "beta=2 r1=0 r2=0 carry=0 sign=+",
        "beta=3 r1=0 r2=0 carry=0 sign=+",
        "beta=5 r1=1 r2=2 carry=0 sign=+",
        "beta=6 r1=0 r2=0 carry=0 sign=-",
        "beta=10 r1=6 r2=2 carry=0 sign=-",
        "beta=15 r1=6 r2=12 carry=1 sign=-",
        "beta=30 r1=6 r2=12 carry=0 sign=+",
    ];
    let terms: Vec<&str> = cli_text
        .lines()
        .filter(|l| l.starts_with("beta="))
        .collect();
    let lines: Vec<&str> = cli_text.lines().collect();
    let ok = code == EXIT_OK
        && holds
        && text == cli_text
        && terms == expected_terms
        && lines.contains(&"phi_T=-1")
        && lines.contains(&"15 - 11 = 5 - 3 + 1 - (-1)")
        && lines.last() == Some(&"4 = 4")
        && elapsed < BREAKDOWN_BUDGET;
    check(
        ok,
        format!("7 terms, carries 0000010, phi_T=-1, 4 = 4, {elapsed:.2?} (< 10 ms)"),
    )
}

/// Identity on [1, 2000] under both engines, single-threaded.
fn ac2_theorem_both_engines(records: &mut Vec<IdentityRecord>) -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let started = Instant::now();
    let summary = pool.install(|| {
        let ctx = IdentityContext::new(THEOREM_RANGE, EngineSelection::Both)?;
        verify_range(1, THEOREM_RANGE, EngineSelection::Both, &ctx)
    });
    let elapsed = started.elapsed();
    let summary = match summary {
        Ok(s) => s,
        Err(e) => return fail(e.to_string()),
    };
    let pairs_agree = summary.records.chunks(2).all(|p| {
        p.len() == 2
            && p[0].engine == Engine::Sieve
            && p[1].engine == Engine::Legendre
            && p[0].same_counts(&p[1])
    });
    let ok = summary.checked == THEOREM_RANGE
        && summary.records.len() == 2 * THEOREM_RANGE as usize
        && summary.records.iter().all(|r| r.holds)
        && summary.passed()
        && pairs_agree
        && elapsed < THEOREM_BUDGET;
    let detail = format!(
        "checked={} failures={} mismatches={} max_terms={} (n={}) elapsed={:.2?} (< 60 s, 1 worker)",
        summary.checked,
        summary.failures.len(),
        summary.mismatches.len(),
        summary.max_terms,
        summary.max_terms_n,
        elapsed
    );
    *records = summary.records;
    check(ok, detail)
}

/// Pruned φ_T against the subset oracle.
fn ac3_phi_t_oracle() -> Outcome {
    let t = sieve_primes(1_000).unwrap();
    let mut bad = 0;
    for n in 1..=40u64 {
        let a = t.pi(n).unwrap() as usize;
        if phi_t(n * n, 2 * n, a, &t).unwrap() != phi_t_naive(n * n, 2 * n, a, &t).unwrap() {
            bad += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    for _ in 0..RANDOM_TRIPLES {
        let bits = rng.gen_range(1..=40);
        let m1 = rng.gen_range(0..1u64 << bits);
        let m2 = rng.gen_range(0..1u64 << bits);
        let a = rng.gen_range(0..=12);
        if phi_t(m1, m2, a, &t).unwrap() != phi_t_naive(m1, m2, a, &t).unwrap() {
            bad += 1;
        }
    }
    check(
        bad == 0,
        format!("40 identity arguments + {RANDOM_TRIPLES} seeded triples, mismatches={bad}"),
    )
}

/// φ grid and Legendre-formula π.
fn ac4_phi_and_legendre_pi() -> Outcome {
    let t = sieve_primes(LEGENDRE_PI_MAX).unwrap();
    let mut cache = PhiCache::new();
    let mut bad_grid = 0;
    for a in 0..=PHI_GRID_A {
        for x in 0..=PHI_GRID_X {
            if phi(x, a, &t, &mut cache).unwrap() != phi_bruteforce(x, a, &t).unwrap() {
                bad_grid += 1;
            }
        }
    }
    let mut bad_pi = 0;
    for m in 0..=LEGENDRE_PI_MAX {
        if pi_via_legendre(m, &t, &mut cache).unwrap() != t.pi(m).unwrap() {
            bad_pi += 1;
        }
    }
    check(
        bad_grid == 0 && bad_pi == 0,
        format!(
            "grid x<=10^4 a<=10 mismatches={bad_grid}; pi_via_legendre M<=10^6 mismatches={bad_pi}"
        ),
    )
}

/// T as a signed floor sum; T-difference identity.
fn ac5_t_identities() -> Outcome {
    let t = sieve_primes(10_000).unwrap();
    let mut cache = PhiCache::new();
    let mut bad1 = 0;
    let mut checked1 = 0;
    for root in 1..=SECTION1_ROOT_MAX {
        let a = t.pi(root).unwrap() as usize;
        for m in root..(root + 1) * (root + 1) {
            checked1 += 1;
            let via_phi = multiple_count_t(root, m, &t, &mut cache, RangeCheck::Enforce).unwrap();
            if via_phi as i64 != signed_floor_sum(m, a, &t).unwrap() {
                bad1 += 1;
            }
        }
    }
    let bad2 = (1..=SECTION2_N_MAX)
        .filter(|&n| !section2_identity_check(n, &t, &mut cache).unwrap().holds)
        .count();
    check(
        bad1 == 0 && bad2 == 0,
        format!("T floor-sum: {checked1} (root, M) pairs, failures={bad1}; T-difference n<=500 failures={bad2}"),
    )
}

/// Corollary-1 equivalence plus the observational P_t report.
fn ac6_corollary(records: &[IdentityRecord]) -> Outcome {
    if records.is_empty() {
        return fail("no records from criterion 2");
    }
    let bad = records
        .iter()
        .filter(|r| !Corollary1::from_record(r).passed())
        .count();
    let points: Vec<SeriesPoint> = records
        .iter()
        .filter(|r| r.engine == Engine::Sieve)
        .map(SeriesPoint::from)
        .collect();
    let ext = PtExtremes::from_points(&points).unwrap();
    let gaps_positive = points.iter().all(|p| p.legendre_gap >= 1);
    check(
        bad == 0,
        format!(
            "equivalence failures={bad} over {} records; observed P_t on [1, 2000]: min={} (n={}) max={} (n={}); gap>=1 everywhere: {gaps_positive}",
            records.len(),
            ext.min,
            ext.min_n,
            ext.max,
            ext.max_n
        ),
    )
}

/// Byte-identical series CSV across runs and worker counts.
fn ac7_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_phit");
    let run = |workers: &str| {
        Command::new(bin)
            .args(["series", "--from", "1", "--to", "500", "--format", "csv"])
            .env(WORKERS_ENV, workers)
            .output()
            .map(|o| (o.status.code(), o.stdout))
    };
    let (Ok(a), Ok(b), Ok(c)) = (run("1"), run("1"), run("4")) else {
        return fail("could not run the phit binary");
    };

    let ctx = IdentityContext::new(SERIES_RANGE, EngineSelection::Sieve).unwrap();
    let in_process: Vec<String> = [1, 3]
        .iter()
        .map(|&k| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .unwrap();
            series_csv(
                &pool
                    .install(|| series(1, SERIES_RANGE, Engine::Sieve, &ctx))
                    .unwrap(),
            )
        })
        .collect();

    let ok = a.0 == Some(0)
        && a == b
        && a == c
        && in_process[0] == in_process[1]
        && in_process[0].as_bytes() == a.1.as_slice()
        && a.1.starts_with(b"n,legendre_gap,bertrand_count,phi_t\n");
    check(
        ok,
        format!(
            "{} bytes, identical for 1/1/4 workers (binary) and 1/3 (in-process)",
            a.1.len()
        ),
    )
}

fn main() -> ExitCode {
    let mut records = Vec::new();
    let criteria: Vec<(&str, Criterion)> = vec![
        (
            "AC1 worked example n=6 breakdown",
            Box::new(|_| ac1_worked_example()),
        ),
        (
            "AC2 identity on [1, 2000], both engines",
            Box::new(ac2_theorem_both_engines),
        ),
        (
            "AC3 phi_T pruned == naive oracle",
            Box::new(|_| ac3_phi_t_oracle()),
        ),
        (
            "AC4 phi == bruteforce, pi_via_legendre == sieve",
            Box::new(|_| ac4_phi_and_legendre_pi()),
        ),
        (
            "AC5 T floor-sum and T-difference identities",
            Box::new(|_| ac5_t_identities()),
        ),
        (
            "AC6 Corollary 1 equivalence",
            Box::new(|r| ac6_corollary(r)),
        ),
        (
            "AC7 series CSV determinism",
            Box::new(|_| ac7_determinism()),
        ),
    ];

    let mut all = true;
    for (name, run) in criteria {
        let started = Instant::now();
        let outcome = run(&mut records);
        all &= outcome.passed;
        println!(
            "[{}] {name}: {} ({:.2?})",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail,
            started.elapsed()
        );
    }
    if all {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
