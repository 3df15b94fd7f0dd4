//! Exact dynamic program over surviving dice sums.
//!
//! A state in layer k is a sum n, with k <= n <= sides*k, whose whole prefix
//! path avoided the target set. Layer probabilities are stored as big-integer
//! numerators over the implicit denominator sides^k: the recurrence
//! `p(k,n) = (1/sides) * sum_i p(k-1, n-i)` only ever adds same-denominator
//! terms, so exactness costs nothing and no per-entry GCD is needed.
//!
//! The survival series is indexed so that `p(k) = P(tau >= k)`:
//! `p(1) = 1` (at least one roll always happens) and for k >= 2 the value
//! `p(k)` is the total mass of layer k-1. Truncated moments follow the
//! tail-sum identities `E_K = sum_{k<=K} p(k)` and
//! `E2_K = sum_{k<=K} (2k-1) p(k)`.

use std::collections::BTreeSet;

use rug::ops::Pow;
use rug::{Assign, Integer, Rational};

use crate::primes::PrimeTable;
use crate::Error;

/// Absorbing set the running sum must avoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// The primes, answered by a [`PrimeTable`].
    Primes,
    /// An explicit finite set (tail certification refuses this; the exact DP
    /// and the simulator accept it).
    Explicit(BTreeSet<u64>),
}

impl Target {
    pub(crate) fn contains(&self, n: u64, table: &PrimeTable) -> bool {
        match self {
            Target::Primes => table.is_prime(n),
            Target::Explicit(set) => set.contains(&n),
        }
    }
}

/// Validated DP parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpConfig {
    sides: u32,
    k_max: u32,
    target: Target,
}

impl DpConfig {
    pub fn new(sides: u32, k_max: u32, target: Target) -> Result<Self, Error> {
        if sides < 2 {
            return Err(Error::Config(format!(
                "need at least 2 die faces, got {sides}"
            )));
        }
        if k_max < 1 {
            return Err(Error::Config("truncation depth must be at least 1".into()));
        }
        if let Target::Explicit(set) = &target {
            if let Some(&m) = set.iter().next() {
                if m < 2 {
                    return Err(Error::Config(format!(
                        "explicit target members must be >= 2, got {m}"
                    )));
                }
            }
        }
        Ok(DpConfig {
            sides,
            k_max,
            target,
        })
    }

    pub fn sides(&self) -> u32 {
        self.sides
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    /// Prime-table limit required by this configuration: every reachable
    /// state and its immediate successors must be queryable.
    pub fn required_table_limit(&self) -> u64 {
        self.sides as u64 * (self.k_max as u64 + 1)
    }
}

/// One DP layer: exact numerators for all states of a fixed k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpLayer {
    k: u32,
    sides: u32,
    /// numerators[i] = numerator of p(k, k+i) over sides^k; target states
    /// stay zero and are never stored as support.
    numerators: Vec<Integer>,
    /// Numerator (over sides^k) of the mass absorbed at exactly step k.
    absorbed_at_step: Integer,
}

impl DpLayer {
    pub fn k(&self) -> u32 {
        self.k
    }

    /// The implicit denominator is sides^k.
    pub fn denominator_exponent(&self) -> u32 {
        self.k
    }

    /// Inclusive state range [k, sides*k].
    pub fn state_range(&self) -> (u64, u64) {
        (self.k as u64, self.sides as u64 * self.k as u64)
    }

    /// Numerator of p(k, n); zero for absorbed or unreachable n in range.
    pub fn numerator(&self, n: u64) -> &Integer {
        let (lo, hi) = self.state_range();
        assert!(
            lo <= n && n <= hi,
            "state {n} outside layer range [{lo}, {hi}]"
        );
        &self.numerators[(n - lo) as usize]
    }

    /// States with nonzero mass, as (n, numerator) pairs in increasing n.
    pub fn support(&self) -> impl Iterator<Item = (u64, &Integer)> {
        let lo = self.k as u64;
        self.numerators
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0)
            .map(move |(i, v)| (lo + i as u64, v))
    }

    /// Numerator of the mass absorbed at exactly this step, over sides^k.
    pub fn absorbed_at_step(&self) -> &Integer {
        &self.absorbed_at_step
    }

    /// Total surviving numerator of this layer.
    pub fn numerator_sum(&self) -> Integer {
        Integer::sum(self.numerators.iter()).into()
    }

    /// P(tau > k) = total layer mass as an exact rational.
    pub fn survival(&self) -> Rational {
        Rational::from((self.numerator_sum(), Integer::from(self.sides).pow(self.k)))
    }
}

/// First layer (k = 1): unit numerator on every non-target face.
pub fn dp_init(config: &DpConfig, table: &PrimeTable) -> Result<DpLayer, Error> {
    let required = config.required_table_limit();
    if table.limit() < required {
        return Err(Error::Sizing {
            required,
            actual: table.limit(),
        });
    }
    let sides = config.sides as u64;
    let mut numerators = vec![Integer::new(); sides as usize];
    let mut absorbed = Integer::new();
    for n in 1..=sides {
        if config.target.contains(n, table) {
            absorbed += 1;
        } else {
            numerators[(n - 1) as usize] = Integer::from(1);
        }
    }
    Ok(DpLayer {
        k: 1,
        sides: config.sides,
        numerators,
        absorbed_at_step: absorbed,
    })
}

/// Advances layer k-1 to layer k.
pub fn dp_step(prev: &DpLayer, config: &DpConfig, table: &PrimeTable) -> DpLayer {
    assert_eq!(prev.sides, config.sides, "layer built for a different die");
    let sides = config.sides as u64;
    let k = prev.k as u64 + 1;
    let (plo, phi) = prev.state_range();
    let lo = k;
    let hi = sides * k;
    let mut numerators = vec![Integer::new(); (hi - lo + 1) as usize];
    let mut absorbed = Integer::new();
    let mut window = Integer::new();
    for n in lo..=hi {
        window.assign(0);
        let i_lo = n.saturating_sub(phi).max(1);
        let i_hi = sides.min(n - plo);
        for i in i_lo..=i_hi {
            window += &prev.numerators[(n - i - plo) as usize];
        }
        if config.target.contains(n, table) {
            absorbed += &window;
        } else {
            std::mem::swap(&mut numerators[(n - lo) as usize], &mut window);
        }
    }
    DpLayer {
        k: prev.k + 1,
        sides: config.sides,
        numerators,
        absorbed_at_step: absorbed,
    }
}

/// Exact survival series and truncated moments at depth K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurvivalSeries {
    sides: u32,
    target: Target,
    /// p_numerators[k-1] = numerator of p(k) over sides^(k-1); entry 0 is 1.
    p_numerators: Vec<Integer>,
    /// E_K numerator over sides^(K-1).
    e_num: Integer,
    /// E2_K numerator over sides^(K-1).
    e2_num: Integer,
}

impl SurvivalSeries {
    /// Truncation depth K.
    pub fn k_max(&self) -> u32 {
        self.p_numerators.len() as u32
    }

    pub fn sides(&self) -> u32 {
        self.sides
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    /// p(k) = P(tau >= k) as an exact rational, for 1 <= k <= K.
    pub fn p(&self, k: u32) -> Rational {
        Rational::from((
            self.p_numerator(k).clone(),
            Integer::from(self.sides).pow(self.denominator_exponent(k)),
        ))
    }

    /// Raw numerator of p(k) over sides^(k-1) (not reduced).
    pub fn p_numerator(&self, k: u32) -> &Integer {
        assert!(
            1 <= k && k <= self.k_max(),
            "series index {k} out of 1..={}",
            self.k_max()
        );
        &self.p_numerators[(k - 1) as usize]
    }

    /// Exponent of the implicit denominator of p(k): k-1.
    pub fn denominator_exponent(&self, k: u32) -> u32 {
        assert!(
            1 <= k && k <= self.k_max(),
            "series index {k} out of 1..={}",
            self.k_max()
        );
        k - 1
    }

    /// E_K = sum_{k=1..K} p(k), exact.
    pub fn e_k(&self) -> Rational {
        Rational::from((
            self.e_num.clone(),
            Integer::from(self.sides).pow(self.k_max() - 1),
        ))
    }

    /// E2_K = sum_{k=1..K} (2k-1) p(k), exact.
    pub fn e2_k(&self) -> Rational {
        Rational::from((
            self.e2_num.clone(),
            Integer::from(self.sides).pow(self.k_max() - 1),
        ))
    }

    /// Raw numerator of E_K over sides^(K-1) (not reduced).
    pub fn e_numerator(&self) -> &Integer {
        &self.e_num
    }

    /// Raw numerator of E2_K over sides^(K-1) (not reduced).
    pub fn e2_numerator(&self) -> &Integer {
        &self.e2_num
    }

    /// Var_K = E2_K - E_K^2, exact.
    pub fn var_k(&self) -> Rational {
        let e = self.e_k();
        self.e2_k() - Rational::from(&e * &e)
    }

    /// Exact (E_k', E2_k', Var_k') for any prefix depth k' <= K, recomputed
    /// from the stored numerators.
    pub fn truncated_moments(&self, k_prime: u32) -> (Rational, Rational, Rational) {
        assert!(1 <= k_prime && k_prime <= self.k_max());
        let mut acc_e = Integer::new();
        let mut acc_e2 = Integer::new();
        for j in 0..k_prime as u64 {
            acc_e *= self.sides;
            acc_e += &self.p_numerators[j as usize];
            acc_e2 *= self.sides;
            acc_e2 += Integer::from(&self.p_numerators[j as usize] * (2 * j + 1));
        }
        let den = Integer::from(self.sides).pow(k_prime - 1);
        let e = Rational::from((acc_e, den.clone()));
        let e2 = Rational::from((acc_e2, den));
        let var = e2.clone() - Rational::from(&e * &e);
        (e, e2, var)
    }
}

/// Runs the DP to depth `k_max`, handing each computed layer (k = 1..=k_max)
/// to `on_layer` before it is dropped.
///
/// Mass conservation is asserted after every step: absorbed mass plus
/// surviving mass must equal sides^k exactly, turning any bookkeeping bug
/// into an immediate panic instead of a silently wrong probability.
pub fn run_dp_with<F: FnMut(&DpLayer)>(
    config: &DpConfig,
    table: &PrimeTable,
    mut on_layer: F,
) -> Result<SurvivalSeries, Error> {
    let k_max = config.k_max;
    let mut p_numerators = vec![Integer::from(1)];
    let mut acc_e = Integer::from(1);
    let mut acc_e2 = Integer::from(1);
    let mut absorbed = Integer::new();
    let mut sides_pow = Integer::from(1);

    let mut layer = dp_init(config, table)?;
    for k in 1..=k_max {
        if k > 1 {
            layer = dp_step(&layer, config, table);
        }
        sides_pow *= config.sides;
        absorbed *= config.sides;
        absorbed += layer.absorbed_at_step();
        let layer_sum = layer.numerator_sum();
        assert_eq!(
            Integer::from(&absorbed + &layer_sum),
            sides_pow,
            "mass conservation violated at k={k}"
        );
        on_layer(&layer);
        if k < k_max {
            acc_e *= config.sides;
            acc_e += &layer_sum;
            acc_e2 *= config.sides;
            acc_e2 += Integer::from(&layer_sum * (2 * k as u64 + 1));
            p_numerators.push(layer_sum);
        }
    }

    Ok(SurvivalSeries {
        sides: config.sides,
        target: config.target.clone(),
        p_numerators,
        e_num: acc_e,
        e2_num: acc_e2,
    })
}

/// [`run_dp_with`] without the layer callback.
pub fn run_dp(config: &DpConfig, table: &PrimeTable) -> Result<SurvivalSeries, Error> {
    run_dp_with(config, table, |_| {})
}
