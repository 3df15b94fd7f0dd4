//! Exact and certified statistics for the stopping time
//! `tau = min { n >= 1 : S_n is prime }`, where `S_n` is the running sum of
//! i.i.d. uniform dice rolls.
//!
//! The crate combines four independent pillars:
//!
//! * [`dp`]: an exact big-integer dynamic program over the surviving sums,
//!   giving the survival series `p(k) = P(tau >= k)` and the truncated
//!   moments `E_K`, `E2_K`, `Var_K` with no rounding error at all;
//! * [`tail`]: certified upper bounds on everything the truncation drops,
//!   computed with directed rounding so floating-point error can only widen
//!   the reported intervals, never shrink them;
//! * [`sim`]: a seeded, reproducible Monte Carlo cross-check;
//! * [`verify`]: sweeps that re-derive the analytic ingredients (per-state
//!   bound, prime-count lower bound, scan claims, brute-force enumeration)
//!   instead of trusting them.
//!
//! Everything is indexed so that `p(1) = P(tau >= 1) = 1`: the process always
//! takes at least one roll. `P(tau >= k)` equals the probability that the
//! first `k - 1` partial sums are all composite-or-one, i.e. the mass of DP
//! layer `k - 1`.
//!
//! The [`cli`] module wires the pillars into the `primehit` binary
//! (subcommands `exact`, `bounds`, `simulate`, `verify`).

pub mod cli;
pub mod dp;
pub mod primes;
pub mod render;
pub mod sim;
pub mod tail;
pub mod verify;

pub use dp::{run_dp, run_dp_with, DpConfig, DpLayer, SurvivalSeries, Target};
pub use primes::{build_prime_table, PntOutcome, PrimeTable};
pub use render::{render_decimal, RoundMode};
pub use sim::{roll_until_prime, run_simulation, tau_from_rolls, SimulationSummary};
pub use tail::{bound_r, bound_r2, bound_rv, certify, proposition_bound, TailOptions, TailReport};

/// Unified error type; the CLI maps each variant onto the exit-code contract.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid parameter or parameter combination (exit code 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// Request exceeds a configured resource budget (exit code 2).
    #[error("resource limit: {0}")]
    Resource(String),
    /// A prime table too small for the requested computation (exit code 2).
    #[error("prime table limit {actual} too small: need at least {required}")]
    Sizing { required: u64, actual: u64 },
    /// Tail certification is not defined for this configuration (exit code 3).
    #[error("certification unavailable: {0}")]
    CertificationUnavailable(String),
    /// Tail certification was attempted but could not be completed (exit code 3).
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    /// A verification sweep or runtime cross-check failed (exit code 4).
    #[error("verification failure: {0}")]
    Verification(String),
    /// Output could not be written (exit code 2).
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code under the CLI contract: 2 for configuration and
    /// resource problems, 3 when certification is refused or fails, 4 for
    /// verification failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Resource(_) | Error::Sizing { .. } | Error::Io(_) => 2,
            Error::CertificationUnavailable(_) | Error::CertificationFailed(_) => 3,
            Error::Verification(_) => 4,
        }
    }
}
