//! Verification sweeps: every analytic ingredient the certified bounds lean
//! on is re-derived here by independent computation rather than trusted.
//!
//! * the per-state survival bound, checked by exact rational comparison on
//!   every DP state with k <= 30;
//! * the prime-count lower bound, swept across the sieve;
//! * the scan claims about the tail functions f and g (unique argmax, ratio
//!   halving under n -> n + ceil(13 ln n)), checked with directed rounding so
//!   a pass cannot be a rounding artifact;
//! * the DP itself, checked against brute-force enumeration of all roll
//!   sequences up to depth 8.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::float::Round;
use rug::ops::{DivAssignRound, Pow};
use rug::{Float, Rational};

use crate::dp::{run_dp_with, DpConfig, Target};
use crate::primes::{PntOutcome, PrimeTable};
use crate::tail::{self, proposition_bound};
use crate::Error;

/// Upper end of the exhaustive f/g scan window.
pub const SCAN_WINDOW_HI: u64 = 100_000;

/// Deepest layer the per-state bound sweep checks.
pub const PROPOSITION_K_MAX: u32 = 30;

/// Depth of the brute-force enumeration sweep (6^8 sequences).
pub const ENUMERATION_DEPTH: u32 = 8;

/// Outcome of one sweep.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Human-readable counterexample when a sweep fails.
    pub witness: Option<String>,
}

impl SweepResult {
    fn pass(name: &'static str, detail: String) -> Self {
        SweepResult {
            name,
            passed: true,
            detail,
            witness: None,
        }
    }

    fn fail(name: &'static str, detail: String, witness: String) -> Self {
        SweepResult {
            name,
            passed: false,
            detail,
            witness: Some(witness),
        }
    }
}

/// Exact per-state check `p(k,n) < (1/3)(5/6)^pi_strict(n)` for all layers
/// k <= k_up_to (6-sided die, primes target).
pub fn sweep_proposition(table: &PrimeTable, k_up_to: u32) -> Result<SweepResult, Error> {
    const NAME: &str = "proposition-bound";
    let config = DpConfig::new(6, k_up_to, Target::Primes)?;
    let mut states = 0u64;
    let mut violation: Option<(u32, u64)> = None;
    run_dp_with(&config, table, |layer| {
        if violation.is_some() {
            return;
        }
        let den = rug::Integer::from(6).pow(layer.k());
        for (n, num) in layer.support() {
            states += 1;
            let p = Rational::from((num.clone(), den.clone()));
            if p >= proposition_bound(n, table) {
                violation = Some((layer.k(), n));
                return;
            }
        }
    })?;
    Ok(match violation {
        None => SweepResult::pass(
            NAME,
            format!("p(k,n) < (1/3)(5/6)^pi(n) exactly, {states} states, k <= {k_up_to}"),
        ),
        Some((k, n)) => SweepResult::fail(
            NAME,
            format!("exact comparison failed after {states} states"),
            format!("k={k}, n={n}"),
        ),
    })
}

/// Sieve sweep of `pi(n) > 0.9 n / ln n` over (1000, table.limit()].
pub fn sweep_pnt(table: &PrimeTable) -> Result<SweepResult, Error> {
    const NAME: &str = "prime-count-lower-bound";
    match table.verify_pnt_lower_bound(1001, table.limit())? {
        PntOutcome::Pass { from, to } => Ok(SweepResult::pass(
            NAME,
            format!("pi(n) > 0.9n/ln(n) for {from} <= n <= {to}"),
        )),
        PntOutcome::Counterexample { n, pi } => Ok(SweepResult::fail(
            NAME,
            "prime-count lower bound violated".into(),
            format!("n={n}, pi={pi}"),
        )),
    }
}

/// Evaluates `eval(n)` upper-rounded for every n in [lo, hi], in fixed-order
/// parallel chunks (bit-identical results regardless of thread count).
fn eval_window(lo: u64, hi: u64, prec: u32, quadratic: bool) -> Vec<Float> {
    const CHUNK: u64 = 1024;
    let n_chunks = (hi - lo + 1).div_ceil(CHUNK);
    (0..n_chunks)
        .into_par_iter()
        .flat_map_iter(|ci| {
            let start = lo + ci * CHUNK;
            let end = (start + CHUNK - 1).min(hi);
            (start..=end).map(move |n| {
                if quadratic {
                    tail::g_tail(n, prec)
                } else {
                    tail::f_tail(n, prec)
                }
            })
        })
        .collect()
}

fn scan_one(name: &'static str, quadratic: bool, expected_argmax: u64, prec: u32) -> SweepResult {
    let lo = 1000u64;
    let hi = SCAN_WINDOW_HI;
    let upper = eval_window(lo, hi, prec, quadratic);

    // Candidate argmax from the upper evaluations.
    let mut best = 0usize;
    for (i, v) in upper.iter().enumerate() {
        if *v > upper[best] {
            best = i;
        }
    }
    let n_star = lo + best as u64;
    // Certified uniqueness: the lower evaluation at the candidate must beat
    // the upper evaluation everywhere else.
    let eval_dir = |n: u64, d: tail::Dir| {
        if quadratic {
            tail::g_tail_dir(n, prec, d)
        } else {
            tail::f_tail_dir(n, prec, d)
        }
    };
    let star_lo = eval_dir(n_star, tail::Dir::Lo);
    for (i, v) in upper.iter().enumerate() {
        if lo + i as u64 != n_star && *v >= star_lo {
            return SweepResult::fail(
                name,
                format!("argmax not certifiably unique on [{lo}, {hi}]"),
                format!("n={} rivals n={}", lo + i as u64, n_star),
            );
        }
    }
    if n_star != expected_argmax {
        return SweepResult::fail(
            name,
            format!("argmax on [{lo}, {hi}] is {n_star}"),
            format!("expected {expected_argmax}"),
        );
    }

    // Ratio halving: value(n + ceil(13 ln n)) / value(n) < 1/2 for all n from
    // the argmax to the window end, ratio rounded up.
    let ratio_from = expected_argmax;
    let (worst_n, worst_ratio) = (ratio_from..=hi)
        .into_par_iter()
        .map(|n| {
            let d = tail::ceil_13_ln(n, prec);
            let mut ratio = eval_dir(n + d, tail::Dir::Hi);
            ratio.div_assign_round(eval_dir(n, tail::Dir::Lo), Round::Up);
            (n, ratio)
        })
        .reduce(
            || (u64::MAX, Float::new(prec)),
            |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    if worst_ratio >= 0.5 {
        return SweepResult::fail(
            name,
            "ratio halving failed".into(),
            format!("n={worst_n}, ratio={:.6}", worst_ratio.to_f64()),
        );
    }
    SweepResult::pass(
        name,
        format!(
            "unique argmax {expected_argmax}; worst ratio {:.4} < 1/2 on [{ratio_from}, {hi}]",
            worst_ratio.to_f64()
        ),
    )
}

/// Exhaustive scan of the tail functions: unique argmax locations and the
/// ratio-halving property, both with directed rounding.
pub fn sweep_scans(prec: u32) -> SweepResult {
    const NAME: &str = "tail-function-scans";
    let f = scan_one(NAME, false, 1050, prec);
    if !f.passed {
        return f;
    }
    let g = scan_one(NAME, true, 1051, prec);
    if !g.passed {
        return g;
    }
    SweepResult::pass(NAME, format!("f: {}; g: {}", f.detail, g.detail))
}

/// Per-depth state counts from brute-force enumeration of all roll sequences.
pub struct EnumOracle {
    /// occupancy[k-1][n] = number of length-k sequences with every partial
    /// sum outside the target and final sum n.
    pub occupancy: Vec<BTreeMap<u64, u64>>,
}

impl EnumOracle {
    /// Number of length-k sequences whose partial sums all avoid the target.
    pub fn survivors(&self, k: u32) -> u64 {
        self.occupancy[(k - 1) as usize].values().sum()
    }
}

/// Walks every roll sequence of the given depth (sides^depth leaves).
pub fn enumerate_layers(sides: u32, depth: u32, target: &Target, table: &PrimeTable) -> EnumOracle {
    fn rec(
        sum: u64,
        k: u32,
        depth: u32,
        sides: u32,
        target: &Target,
        table: &PrimeTable,
        occ: &mut [BTreeMap<u64, u64>],
    ) {
        for face in 1..=sides as u64 {
            let s = sum + face;
            if !target.contains(s, table) {
                *occ[k as usize].entry(s).or_insert(0) += 1;
                if k + 1 < depth {
                    rec(s, k + 1, depth, sides, target, table, occ);
                }
            }
        }
    }
    let mut occupancy = vec![BTreeMap::new(); depth as usize];
    rec(0, 0, depth, sides, target, table, &mut occupancy);
    EnumOracle { occupancy }
}

/// DP layers and series numerators against brute-force enumeration, exact
/// integer equality, for k <= depth (6-sided die, primes target).
pub fn sweep_enumeration(table: &PrimeTable, depth: u32) -> Result<SweepResult, Error> {
    const NAME: &str = "dp-vs-enumeration";
    let config = DpConfig::new(6, depth, Target::Primes)?;
    let oracle = enumerate_layers(6, depth, &Target::Primes, table);
    let mut mismatch: Option<String> = None;
    let mut layers = Vec::new();
    let series = run_dp_with(&config, table, |layer| layers.push(layer.clone()))?;
    'outer: for layer in &layers {
        let k = layer.k();
        let expect = &oracle.occupancy[(k - 1) as usize];
        let dp_map: BTreeMap<u64, u64> = layer
            .support()
            .map(|(n, num)| (n, num.to_u64().expect("counts fit u64 at this depth")))
            .collect();
        if &dp_map != expect {
            for (n, c) in expect {
                if dp_map.get(n) != Some(c) {
                    mismatch = Some(format!("k={k}, n={n}"));
                    break 'outer;
                }
            }
            for n in dp_map.keys() {
                if !expect.contains_key(n) {
                    mismatch = Some(format!("k={k}, n={n}"));
                    break 'outer;
                }
            }
        }
        // The series links to layer sums: p(k+1) numerator = survivors(k).
        if k < depth && *series.p_numerator(k + 1) != oracle.survivors(k) {
            mismatch = Some(format!("series p({}) numerator", k + 1));
            break;
        }
    }
    Ok(match mismatch {
        None => SweepResult::pass(
            NAME,
            format!("all layers and series numerators match 6^{depth} enumeration"),
        ),
        Some(w) => SweepResult::fail(NAME, "DP disagrees with enumeration".into(), w),
    })
}

/// Runs the four standard sweeps.
pub fn run_all_sweeps(table: &PrimeTable, precision_bits: u32) -> Result<Vec<SweepResult>, Error> {
    Ok(vec![
        sweep_proposition(table, PROPOSITION_K_MAX)?,
        sweep_pnt(table)?,
        sweep_scans(precision_bits),
        sweep_enumeration(table, ENUMERATION_DEPTH)?,
    ])
}
