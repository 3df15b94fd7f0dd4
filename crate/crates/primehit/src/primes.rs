//! Prime sieve with strict prime counting.
//!
//! The counting convention here is *strict*: `pi_strict(n)` is the number of
//! primes `p < n`, not the textbook `p <= n`. The per-state survival bound
//! `p(k,n) < (1/3)(5/6)^pi_strict(n)` needs exactly this convention (its base
//! cases at n = 1, 4, 6 use exponents 0, 2, 3), and for the tail bounds the
//! one-unit difference only ever makes a bound larger, i.e. safe.

use crate::Error;

/// Largest sieve limit accepted by [`build_prime_table`]. The prefix-count
/// table costs 4 bytes per integer, so this cap keeps construction under
/// ~400 MB.
pub const MAX_SIEVE_LIMIT: u64 = 100_000_000;

/// Sieve-backed primality oracle over `0..=limit` with strict prefix counts.
///
/// Immutable after construction; shared read access from many threads is fine.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    bits: Vec<u64>,
    prefix: Vec<u32>,
}

/// Outcome of [`PrimeTable::verify_pnt_lower_bound`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PntOutcome {
    /// `pi_strict(n) > 0.9 n / ln n` held for every n in the range.
    Pass { from: u64, to: u64 },
    /// Smallest failing n, with the strict prime count at that point.
    Counterexample { n: u64, pi: u64 },
}

impl PntOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, PntOutcome::Pass { .. })
    }
}

/// Builds a [`PrimeTable`] valid for all queries with argument `<= limit`.
pub fn build_prime_table(limit: u64) -> Result<PrimeTable, Error> {
    if limit < 2 {
        return Err(Error::Config(format!(
            "sieve limit must be at least 2, got {limit}"
        )));
    }
    if limit > MAX_SIEVE_LIMIT {
        return Err(Error::Resource(format!(
            "sieve limit {limit} exceeds the memory budget cap {MAX_SIEVE_LIMIT}"
        )));
    }
    let n = limit as usize;
    let words = n / 64 + 1;
    let mut bits = vec![u64::MAX; words];
    let clear = |bits: &mut [u64], i: usize| bits[i / 64] &= !(1u64 << (i % 64));
    clear(&mut bits, 0);
    clear(&mut bits, 1);
    let mut p = 2usize;
    while p * p <= n {
        if bits[p / 64] >> (p % 64) & 1 == 1 {
            let mut m = p * p;
            while m <= n {
                clear(&mut bits, m);
                m += p;
            }
        }
        p += 1;
    }
    // Mask out bits beyond `limit` so popcount-style scans cannot overcount.
    let last_used = n % 64;
    if last_used != 63 {
        bits[words - 1] &= (1u64 << (last_used + 1)) - 1;
    }

    // prefix[m] = #{p prime : p < m}, for m in 0..=limit.
    let mut prefix = vec![0u32; n + 1];
    let mut count = 0u32;
    for m in 1..=n {
        if bits[(m - 1) / 64] >> ((m - 1) % 64) & 1 == 1 {
            count += 1;
        }
        prefix[m] = count;
    }

    Ok(PrimeTable {
        limit,
        bits,
        prefix,
    })
}

impl PrimeTable {
    /// Largest n for which queries are valid.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// True iff n is prime. Panics if `n > limit` (caller must size the table).
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(
            n <= self.limit,
            "is_prime({n}) queried beyond table limit {}",
            self.limit
        );
        let i = n as usize;
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of primes strictly below n. Panics if `n > limit`.
    pub fn pi_strict(&self, n: u64) -> u64 {
        assert!(
            n <= self.limit,
            "pi_strict({n}) queried beyond table limit {}",
            self.limit
        );
        self.prefix[n as usize] as u64
    }

    /// Checks `pi_strict(n) > 0.9 n / ln n` for every n in `[from, to]`.
    ///
    /// The right-hand side is evaluated in f64 and then bumped by an absolute
    /// 1e-6 before comparing, so rounding noise in ln/div/mul (below 1e-8 at
    /// these magnitudes) can only cause a false *failure*, never a false pass.
    pub fn verify_pnt_lower_bound(&self, from: u64, to: u64) -> Result<PntOutcome, Error> {
        if !(1000 < from && from <= to && to <= self.limit) {
            return Err(Error::Config(format!(
                "range [{from}, {to}] invalid: need 1000 < from <= to <= {}",
                self.limit
            )));
        }
        for n in from..=to {
            let rhs_up = 0.9 * n as f64 / (n as f64).ln() + 1e-6;
            if self.pi_strict(n) as f64 <= rhs_up {
                return Ok(PntOutcome::Counterexample {
                    n,
                    pi: self.pi_strict(n),
                });
            }
        }
        Ok(PntOutcome::Pass { from, to })
    }

    /// Fault-injection hook for tests of the verification sweeps: shifts the
    /// strict counts for all n >= from, desynchronizing them from the bit
    /// table. Not part of the public contract.
    #[doc(hidden)]
    pub fn debug_shift_prefix(&mut self, from: u64, delta: i64) {
        for m in from as usize..self.prefix.len() {
            self.prefix[m] = (self.prefix[m] as i64 + delta).max(0) as u32;
        }
    }
}
