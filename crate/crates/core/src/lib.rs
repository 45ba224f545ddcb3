//! Exact evaluation of the transformed Legendre function φ_T and of the
//! identity linking the Legendre gap π((n+1)²) − π(n²) to the Bertrand count
//! π(2n) − π(n):
//!
//! ```text
//! π((n+1)²) − π(n²) = π(2n) − π(n) + 1 − φ_T(n², 2n, π(n))
//! ```
//!
//! Modules, bottom-up:
//!
//! * [`primes`]: sieve and π(x) lookup, the ground truth for everything else.
//! * [`legendre_phi`]: Legendre's φ(x, a) and π via Legendre's formula.
//! * [`phi_transform`]: φ_T, the multiple-counting function T and the
//!   squarefree term enumeration behind both.
//! * [`identity`]: per-n records, range verification and the B_t/P_t series.
//! * [`selftest`]: the invariant suites bundled for the command line.

pub mod error;
pub mod identity;
pub mod legendre_phi;
pub mod phi_transform;
pub mod primes;
pub mod selftest;

pub use error::{Error, Result};
pub use identity::{
    corollary1_check, evaluate_theorem1, section2_identity_check, series, telescoping_check,
    verify_range, Corollary1, Engine, EngineSelection, IdentityContext, IdentityRecord, PtExtremes,
    RangeSummary, Section2Check, SeriesPoint,
};
pub use legendre_phi::{phi, phi_bruteforce, pi_via_legendre, PhiCache};
pub use phi_transform::{
    breakdown, carry_term, enumerate_squarefree_terms, multiple_count_t, phi_t, phi_t_naive,
    residue_h, signed_floor_sum, BreakdownTerm, RangeCheck, SquarefreeTerm, TermBreakdown,
};
pub use primes::{pi, sieve_primes, PrimeTable};
