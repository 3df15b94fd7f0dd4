//! Seeded Monte Carlo simulation of the stopping time.
//!
//! Episodes are grouped into fixed-size batches; batch b draws from stream b
//! of a counter-based generator seeded with the run seed. Batches are the
//! atomic unit of work and all merge arithmetic is exact integer arithmetic
//! with commutative-associative merges, so a summary depends only on
//! (reps, seed, sides, cap), never on worker count or scheduling order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::primes::PrimeTable;
use crate::Error;

/// Default roll cap per episode. The exact DP puts P(tau >= 1000) below
/// 1e-50, so a default-sized run hitting the cap indicates a bug, not luck.
pub const DEFAULT_CAP: u64 = 10_000;

/// Episodes per RNG stream. Fixed so that results are independent of the
/// worker count.
const BATCH_SIZE: u64 = 16_384;

/// Histogram covers tau = 1..=HIST_CAP; larger values land in the overflow
/// bucket (far beyond any mass the exact series leaves there).
pub const HIST_CAP: usize = 256;

/// Merged statistics over all episodes of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub reps: u64,
    pub seed: u64,
    /// Episodes that hit the target within the cap.
    pub completed: u64,
    /// Episodes aborted at the roll cap (counted, never silently dropped).
    pub cap_overflow: u64,
    pub cap: u64,
    /// Sample mean of tau over completed episodes.
    pub mean: f64,
    /// Unbiased sample variance over completed episodes; 0 by convention when
    /// only one episode completed (flagged via `degenerate`).
    pub variance: f64,
    /// Largest observed tau.
    pub max: u64,
    /// histogram[k-1] = number of episodes with tau = k, for k = 1..=HIST_CAP.
    pub histogram: Vec<u64>,
    /// Episodes with tau > HIST_CAP plus the cap-aborted ones, so that the
    /// histogram (with this bucket) always totals `reps`.
    pub histogram_overflow: u64,
    /// True when the variance convention for a single completed episode was
    /// applied.
    pub degenerate: bool,
}

/// Stopping time for an explicit roll sequence: the index of the first prefix
/// sum in the target, or None if `cap` rolls pass without a hit.
pub fn tau_from_rolls(
    rolls: impl IntoIterator<Item = u64>,
    table: &PrimeTable,
    cap: u64,
) -> Option<u64> {
    let mut sum = 0u64;
    for (i, roll) in rolls.into_iter().take(cap as usize).enumerate() {
        sum += roll;
        if table.is_prime(sum) {
            return Some(i as u64 + 1);
        }
    }
    None
}

/// Simulates one episode: i.i.d. uniform rolls on 1..=sides until the running
/// sum is prime, or None after `cap` rolls.
pub fn roll_until_prime<R: Rng>(
    rng: &mut R,
    sides: u32,
    table: &PrimeTable,
    cap: u64,
) -> Option<u64> {
    let mut sum = 0u64;
    for n in 1..=cap {
        sum += rng.random_range(1..=sides as u64);
        if table.is_prime(sum) {
            return Some(n);
        }
    }
    None
}

#[derive(Clone)]
struct BatchStats {
    completed: u64,
    cap_overflow: u64,
    sum: u64,
    sum_sq: u128,
    max: u64,
    histogram: Vec<u64>,
    histogram_overflow: u64,
}

impl BatchStats {
    fn new() -> Self {
        BatchStats {
            completed: 0,
            cap_overflow: 0,
            sum: 0,
            sum_sq: 0,
            max: 0,
            histogram: vec![0; HIST_CAP],
            histogram_overflow: 0,
        }
    }

    fn record(&mut self, tau: Option<u64>) {
        match tau {
            Some(t) => {
                self.completed += 1;
                self.sum += t;
                self.sum_sq += (t as u128) * (t as u128);
                self.max = self.max.max(t);
                if t as usize <= HIST_CAP {
                    self.histogram[(t - 1) as usize] += 1;
                } else {
                    self.histogram_overflow += 1;
                }
            }
            None => {
                self.cap_overflow += 1;
                self.histogram_overflow += 1;
            }
        }
    }

    fn merge(mut self, other: BatchStats) -> BatchStats {
        self.completed += other.completed;
        self.cap_overflow += other.cap_overflow;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.max = self.max.max(other.max);
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        self.histogram_overflow += other.histogram_overflow;
        self
    }
}

/// Runs `reps` independent episodes and merges their statistics.
pub fn run_simulation(
    reps: u64,
    seed: u64,
    sides: u32,
    table: &PrimeTable,
    workers: usize,
    cap: u64,
) -> Result<SimulationSummary, Error> {
    if reps < 1 {
        return Err(Error::Config("need at least one replication".into()));
    }
    if workers < 1 {
        return Err(Error::Config("need at least one worker".into()));
    }
    if sides < 2 {
        return Err(Error::Config(format!(
            "need at least 2 die faces, got {sides}"
        )));
    }
    if cap < 1 {
        return Err(Error::Config("roll cap must be at least 1".into()));
    }
    if reps > 1 << 40 {
        return Err(Error::Resource(format!(
            "replication count {reps} exceeds the 2^40 budget"
        )));
    }
    let required = cap
        .checked_mul(sides as u64)
        .ok_or_else(|| Error::Config(format!("roll cap {cap} overflows the state range")))?;
    if table.limit() < required {
        return Err(Error::Sizing {
            required,
            actual: table.limit(),
        });
    }

    let batches = reps.div_ceil(BATCH_SIZE);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let stats = pool.install(|| {
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b);
                let episodes = BATCH_SIZE.min(reps - b * BATCH_SIZE);
                let mut stats = BatchStats::new();
                for _ in 0..episodes {
                    stats.record(roll_until_prime(&mut rng, sides, table, cap));
                }
                stats
            })
            .reduce(BatchStats::new, BatchStats::merge)
    });

    if stats.completed == 0 {
        return Err(Error::Verification(
            "no episode completed within the roll cap".into(),
        ));
    }
    let mean = stats.sum as f64 / stats.completed as f64;
    let degenerate = stats.completed < 2;
    let variance = if degenerate {
        0.0
    } else {
        // Unbiased: (n * sum_sq - sum^2) / (n * (n - 1)), numerator exact.
        let n = stats.completed as u128;
        let num = n * stats.sum_sq - (stats.sum as u128) * (stats.sum as u128);
        num as f64 / (n * (n - 1)) as f64
    };

    Ok(SimulationSummary {
        reps,
        seed,
        completed: stats.completed,
        cap_overflow: stats.cap_overflow,
        cap,
        mean,
        variance,
        max: stats.max,
        histogram: stats.histogram,
        histogram_overflow: stats.histogram_overflow,
        degenerate,
    })
}
