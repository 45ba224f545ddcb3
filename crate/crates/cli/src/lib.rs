//! `phit` command-line surface: range verification, the term-by-term
//! breakdown of φ_T for one n, B_t/P_t series data and the self-test.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 usage or
//! configuration error.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::ThreadPool;

use phit_core::identity::EngineMismatch;
use phit_core::selftest::{run_selftest, SelftestOptions};
use phit_core::{
    breakdown, evaluate_theorem1, series, verify_range, Engine, EngineSelection, Error,
    IdentityContext, IdentityRecord, PhiCache, PtExtremes, RangeSummary, SeriesPoint,
};

/// Environment variable holding the worker count (default: available parallelism).
pub const WORKERS_ENV: &str = "PHIT_WORKERS";

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "phit",
    version,
    about = "Legendre gap vs Bertrand count via the transformed Legendre function"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the identity for every n in a range.
    Verify(RangeArgs),
    /// Print φ_T(n², 2n, π(n)) term by term and the substituted identity.
    Breakdown(BreakdownArgs),
    /// Emit (n, legendre_gap, bertrand_count, phi_t) rows.
    Series(RangeArgs),
    /// Run the invariant suites at reduced bounds.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Sieve,
    Legendre,
    Both,
}

impl From<EngineArg> for EngineSelection {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Sieve => EngineSelection::Sieve,
            EngineArg::Legendre => EngineSelection::Legendre,
            EngineArg::Both => EngineSelection::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Largest π(n) for which the subset oracle shadows φ_T (at most 20).
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u8).range(0..=20))]
    pub naive_threshold: u8,

    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Args)]
pub struct RangeArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub from: u64,

    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub to: u64,

    #[arg(long, value_enum, default_value_t = EngineArg::Sieve)]
    pub engine: EngineArg,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BreakdownArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Reduced suite.
    #[arg(long)]
    pub quick: bool,

    /// Perturb one identity evaluation; the run must then fail.
    #[arg(long, hide = true)]
    pub inject_fault: bool,

    #[command(flatten)]
    pub common: CommonArgs,
}

/// A command failure, carrying the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ShadowMismatch { .. } => EXIT_CHECK_FAILED,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(format!("output error: {e}"))
    }
}

type CmdResult = Result<u8, Failure>;

/// Parses `args` (including the program name) and runs the command, writing
/// to `--out` or to `stdout`. Diagnostics go to `stderr`.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let pool = worker_pool()?;
    match &cli.command {
        Command::Verify(args) => {
            with_output(&args.common, stdout, |w| cmd_verify(args, &pool, w, stderr))
        }
        Command::Breakdown(args) => with_output(&args.common, stdout, |w| cmd_breakdown(args, w)),
        Command::Series(args) => with_output(&args.common, stdout, |w| cmd_series(args, &pool, w)),
        Command::Selftest(args) => {
            with_output(&args.common, stdout, |w| cmd_selftest(args, &pool, w))
        }
    }
}

/// Pool sized by [`WORKERS_ENV`], or by available parallelism when unset.
pub fn worker_pool() -> Result<ThreadPool, Failure> {
    let workers = match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| {
                Failure::usage(format!(
                    "{WORKERS_ENV} must be a positive integer, got {v:?}"
                ))
            })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure::usage(format!("cannot start worker pool: {e}")))
}

fn with_output<F>(common: &CommonArgs, stdout: &mut dyn Write, body: F) -> CmdResult
where
    F: FnOnce(&mut dyn Write) -> CmdResult,
{
    match &common.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            let code = body(&mut w)?;
            w.flush()?;
            Ok(code)
        }
        None => {
            let code = body(stdout)?;
            stdout.flush()?;
            Ok(code)
        }
    }
}

fn range_context(args: &RangeArgs) -> Result<IdentityContext, Failure> {
    if args.from > args.to {
        return Err(Failure::usage(format!(
            "invalid range: --from {} is greater than --to {}",
            args.from, args.to
        )));
    }
    Ok(IdentityContext::new(args.to, args.engine.into())?
        .with_shadow_threshold(args.common.naive_threshold as usize)?)
}

/// Signed rendering for text output: `+2`, `0`, `-1`.
pub fn signed(v: i64) -> String {
    if v > 0 {
        format!("+{v}")
    } else {
        v.to_string()
    }
}

pub fn record_line(r: &IdentityRecord) -> String {
    format!(
        "n={} engine={} pi((n+1)^2)={} pi(n^2)={} pi(2n)={} pi(n)={} phi_T={} lhs={} rhs={} holds={}",
        r.n,
        r.engine.name(),
        r.pi_next2,
        r.pi_n2,
        r.pi_2n,
        r.pi_n,
        signed(r.phi_t),
        r.lhs,
        r.rhs,
        r.holds
    )
}

pub fn summary_line(s: &RangeSummary) -> String {
    format!(
        "checked={} failures={} elapsed={:.3}",
        s.checked,
        s.failures.len() + s.mismatches.len(),
        s.elapsed.as_secs_f64()
    )
}

fn mismatch_line(m: &EngineMismatch) -> String {
    format!(
        "engine mismatch at n={}: sieve [{}] legendre [{}]",
        m.sieve.n,
        record_line(&m.sieve),
        record_line(&m.legendre)
    )
}

pub fn cmd_verify(
    args: &RangeArgs,
    pool: &ThreadPool,
    w: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let ctx = range_context(args)?;
    let summary = pool.install(|| verify_range(args.from, args.to, args.engine.into(), &ctx))?;
    match args.common.format {
        Format::Text => {
            if args.common.verbose >= 1 {
                for r in &summary.records {
                    writeln!(w, "{}", record_line(r))?;
                }
            }
            for r in &summary.failures {
                writeln!(w, "FAILED {}", record_line(r))?;
            }
            for m in &summary.mismatches {
                writeln!(w, "{}", mismatch_line(m))?;
            }
            writeln!(w, "{}", summary_line(&summary))?;
            if args.common.verbose >= 1 {
                writeln!(
                    w,
                    "max_terms={} at n={}",
                    summary.max_terms, summary.max_terms_n
                )?;
            }
        }
        Format::Csv => {
            writeln!(w, "n,engine,pi_n2,pi_next2,pi_n,pi_2n,phi_t,lhs,rhs,holds")?;
            for r in &summary.records {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.n,
                    r.engine.name(),
                    r.pi_n2,
                    r.pi_next2,
                    r.pi_n,
                    r.pi_2n,
                    r.phi_t,
                    r.lhs,
                    r.rhs,
                    r.holds
                )?;
            }
            writeln!(stderr, "{}", summary_line(&summary))?;
        }
        Format::Json => {
            let doc = serde_json::json!({
                "records": summary.records,
                "summary": {
                    "checked": summary.checked,
                    "failures": summary.failures,
                    "mismatches": summary.mismatches,
                    "elapsed_secs": summary.elapsed.as_secs_f64(),
                    "max_terms": summary.max_terms,
                    "max_terms_n": summary.max_terms_n,
                },
            });
            writeln!(
                w,
                "{}",
                serde_json::to_string_pretty(&doc).map_err(io::Error::other)?
            )?;
        }
    }
    Ok(if summary.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

/// Renders the breakdown for `n` as the text the `breakdown` command prints.
pub fn breakdown_text(n: u64, shadow_threshold: usize) -> Result<(String, bool), Failure> {
    let ctx =
        IdentityContext::new(n, EngineSelection::Sieve)?.with_shadow_threshold(shadow_threshold)?;
    let table = ctx.table(Engine::Sieve).expect("sieve table");
    let record = evaluate_theorem1(n, Engine::Sieve, &ctx, &mut PhiCache::new())?;
    let b = breakdown(n * n, 2 * n, record.pi_n as usize, table)?;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "n={} M1={} M2={} pi(n)={} terms={}",
        n,
        b.m1,
        b.m2,
        b.a,
        b.terms.len()
    );
    for t in &b.terms {
        let _ = writeln!(
            s,
            "beta={} r1={} r2={} carry={} sign={}",
            t.term.beta,
            t.residue_m1,
            t.residue_m2,
            t.carry,
            if t.term.sign() > 0 { '+' } else { '-' }
        );
    }
    let _ = writeln!(s, "phi_T={}", signed(b.total));
    let _ = writeln!(
        s,
        "pi({}) - pi({}) = pi({}) - pi({}) + 1 - ({})",
        (n + 1) * (n + 1),
        n * n,
        2 * n,
        n,
        signed(record.phi_t)
    );
    let _ = writeln!(
        s,
        "{} - {} = {} - {} + 1 - ({})",
        record.pi_next2,
        record.pi_n2,
        record.pi_2n,
        record.pi_n,
        signed(record.phi_t)
    );
    let _ = writeln!(s, "{} = {}", record.lhs, record.rhs);
    Ok((s, record.holds && b.total == record.phi_t))
}

pub fn cmd_breakdown(args: &BreakdownArgs, w: &mut dyn Write) -> CmdResult {
    let threshold = args.common.naive_threshold as usize;
    let ok = match args.common.format {
        Format::Text => {
            let (text, ok) = breakdown_text(args.n, threshold)?;
            w.write_all(text.as_bytes())?;
            ok
        }
        Format::Json | Format::Csv => {
            let n = args.n;
            let ctx = IdentityContext::new(n, EngineSelection::Sieve)?
                .with_shadow_threshold(threshold)?;
            let table = ctx.table(Engine::Sieve).expect("sieve table");
            let record = evaluate_theorem1(n, Engine::Sieve, &ctx, &mut PhiCache::new())?;
            let b = breakdown(n * n, 2 * n, record.pi_n as usize, table)?;
            if args.common.format == Format::Csv {
                writeln!(w, "beta,k,r1,r2,carry,signed_value")?;
                for t in &b.terms {
                    writeln!(
                        w,
                        "{},{},{},{},{},{}",
                        t.term.beta,
                        t.term.k(),
                        t.residue_m1,
                        t.residue_m2,
                        t.carry,
                        t.signed_value
                    )?;
                }
            } else {
                let doc = serde_json::json!({ "n": n, "breakdown": b, "record": record });
                writeln!(
                    w,
                    "{}",
                    serde_json::to_string_pretty(&doc).map_err(io::Error::other)?
                )?;
            }
            record.holds && b.total == record.phi_t
        }
    };
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// CSV rendering of a series: fixed header, one newline-terminated row per point.
pub fn series_csv(points: &[SeriesPoint]) -> String {
    let mut s = String::from("n,legendre_gap,bertrand_count,phi_t\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            p.n, p.legendre_gap, p.bertrand_count, p.phi_t
        );
    }
    s
}

pub fn cmd_series(args: &RangeArgs, pool: &ThreadPool, w: &mut dyn Write) -> CmdResult {
    let ctx = range_context(args)?;
    let selection: EngineSelection = args.engine.into();
    let points = pool.install(|| series(args.from, args.to, selection.engines()[0], &ctx))?;
    let mut ok = points.iter().all(SeriesPoint::consistent);
    if selection == EngineSelection::Both {
        ok &= pool.install(|| series(args.from, args.to, Engine::Legendre, &ctx))? == points;
    }
    match args.common.format {
        Format::Csv => w.write_all(series_csv(&points).as_bytes())?,
        Format::Json => writeln!(
            w,
            "{}",
            serde_json::to_string_pretty(&points).map_err(io::Error::other)?
        )?,
        Format::Text => {
            writeln!(
                w,
                "{:>8} {:>12} {:>14} {:>6}",
                "n", "legendre_gap", "bertrand_count", "phi_t"
            )?;
            for p in &points {
                writeln!(
                    w,
                    "{:>8} {:>12} {:>14} {:>6}",
                    p.n,
                    p.legendre_gap,
                    p.bertrand_count,
                    signed(p.phi_t)
                )?;
            }
            if let Some(e) = PtExtremes::from_points(&points) {
                writeln!(
                    w,
                    "phi_t min={} (n={}) max={} (n={})",
                    signed(e.min),
                    e.min_n,
                    signed(e.max),
                    e.max_n
                )?;
            }
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn cmd_selftest(args: &SelftestArgs, pool: &ThreadPool, w: &mut dyn Write) -> CmdResult {
    let opts = SelftestOptions {
        quick: args.quick,
        inject_fault: args.inject_fault,
    };
    let outcomes = pool.install(|| run_selftest(opts))?;
    for o in &outcomes {
        writeln!(
            w,
            "{} {} {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        )?;
    }
    Ok(if outcomes.iter().all(|o| o.passed) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}
