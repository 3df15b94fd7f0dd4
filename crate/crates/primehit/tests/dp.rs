//! Exact-DP unit tests against frozen hand-checked oracles and a small
//! independent brute-force enumeration.

use std::collections::BTreeSet;

use primehit::dp::{dp_init, dp_step};
use primehit::{build_prime_table, run_dp, DpConfig, Error, Target};
use rug::ops::Pow;
use rug::{Integer, Rational};

/// Survival-layer numerator sums for the 6-sided die and primes target,
/// computed by brute-force enumeration over all 6^k sequences and frozen.
/// Entry j is the mass numerator of layer j+1 over 6^(j+1).
const FROZEN_LAYER_SUMS: [u64; 8] = [3, 10, 40, 160, 670, 3001, 13503, 60408];

fn table() -> primehit::PrimeTable {
    build_prime_table(1_000).unwrap()
}

#[test]
fn config_validation() {
    assert!(matches!(
        DpConfig::new(1, 10, Target::Primes),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        DpConfig::new(6, 0, Target::Primes),
        Err(Error::Config(_))
    ));
    let low = Target::Explicit(BTreeSet::from([1u64, 5]));
    assert!(matches!(DpConfig::new(6, 10, low), Err(Error::Config(_))));
    let ok = DpConfig::new(6, 10, Target::Explicit(BTreeSet::from([4u64]))).unwrap();
    assert_eq!(ok.required_table_limit(), 66);
}

#[test]
fn init_layer_holds_the_non_target_faces() {
    let config = DpConfig::new(6, 5, Target::Primes).unwrap();
    let layer = dp_init(&config, &table()).unwrap();
    assert_eq!(layer.k(), 1);
    assert_eq!(layer.state_range(), (1, 6));
    // Faces 2, 3, 5 are prime and absorb immediately; 1, 4, 6 survive.
    assert_eq!(layer.numerator(1), &Integer::from(1));
    assert_eq!(layer.numerator(2), &Integer::from(0));
    assert_eq!(layer.numerator(4), &Integer::from(1));
    assert_eq!(layer.numerator(6), &Integer::from(1));
    assert_eq!(layer.absorbed_at_step(), &Integer::from(3));
    assert_eq!(layer.numerator_sum(), Integer::from(3));
    assert_eq!(layer.survival(), Rational::from((1, 2)));
}

#[test]
fn second_layer_matches_the_hand_computed_map() {
    let config = DpConfig::new(6, 5, Target::Primes).unwrap();
    let t = table();
    let layer2 = dp_step(&dp_init(&config, &t).unwrap(), &config, &t);
    assert_eq!(layer2.k(), 2);
    assert_eq!(layer2.state_range(), (2, 12));
    let expected = [(4, 1), (6, 2), (8, 2), (9, 2), (10, 2), (12, 1)];
    let got: Vec<(u64, u64)> = layer2
        .support()
        .map(|(n, v)| (n, v.to_u64().unwrap()))
        .collect();
    assert_eq!(got, expected);
    assert_eq!(layer2.survival(), Rational::from((10, 36)));
}

#[test]
fn undersized_table_is_a_sizing_error() {
    let config = DpConfig::new(6, 200, Target::Primes).unwrap();
    // Needs 6 * 201 = 1206 > 1000.
    assert!(matches!(
        run_dp(&config, &table()),
        Err(Error::Sizing {
            required: 1206,
            actual: 1000
        })
    ));
}

#[test]
fn series_matches_the_frozen_layer_sums() {
    let config = DpConfig::new(6, 9, Target::Primes).unwrap();
    let series = run_dp(&config, &table()).unwrap();
    assert_eq!(series.k_max(), 9);
    // p(1) = 1 by convention: at least one roll always happens.
    assert_eq!(series.p_numerator(1), &Integer::from(1));
    assert_eq!(series.denominator_exponent(1), 0);
    assert_eq!(series.p(1), Rational::from(1));
    for (j, sum) in FROZEN_LAYER_SUMS.iter().enumerate() {
        let k = j as u32 + 2;
        assert_eq!(
            series.p_numerator(k),
            &Integer::from(*sum),
            "p({k}) numerator"
        );
        assert_eq!(series.denominator_exponent(k), k - 1);
    }
}

#[test]
fn moments_recompose_from_the_frozen_sums() {
    let config = DpConfig::new(6, 8, Target::Primes).unwrap();
    let series = run_dp(&config, &table()).unwrap();

    // E_8 and E2_8 rebuilt here from the frozen numerators, independently of
    // the accumulation inside run_dp.
    let den = Integer::from(6).pow(7);
    let mut e_num = den.clone();
    let mut e2_num = den.clone();
    for (j, sum) in FROZEN_LAYER_SUMS[..7].iter().enumerate() {
        let k = j as u32 + 2;
        let scale = Integer::from(6).pow(7 - (k - 1));
        e_num += Integer::from(*sum) * &scale;
        e2_num += Integer::from(*sum) * scale * (2 * k - 1);
    }
    assert_eq!(e_num, Integer::from(639_693u64));
    assert_eq!(e2_num, Integer::from(2_464_503u64));

    assert_eq!(series.e_k(), Rational::from((e_num.clone(), den.clone())));
    assert_eq!(series.e2_k(), Rational::from((e2_num.clone(), den.clone())));
    let e = Rational::from((e_num, den.clone()));
    let e2 = Rational::from((e2_num, den));
    assert_eq!(series.var_k(), e2 - Rational::from(&e * &e));
}

#[test]
fn depth_one_series_is_degenerate() {
    // p(1) = 1 is the whole series: E_1 = E2_1 = 1 and Var_1 = 0.
    let config = DpConfig::new(6, 1, Target::Primes).unwrap();
    let series = run_dp(&config, &table()).unwrap();
    assert_eq!(series.e_k(), Rational::from(1));
    assert_eq!(series.e2_k(), Rational::from(1));
    assert_eq!(series.var_k(), Rational::from(0));
}

#[test]
fn survival_is_monotone_non_increasing() {
    let config = DpConfig::new(6, 40, Target::Primes).unwrap();
    let series = run_dp(&config, &table()).unwrap();
    for k in 1..40 {
        assert!(
            series.p(k + 1) <= series.p(k),
            "p must not increase at k = {k}"
        );
        assert!(series.p(k + 1) > 0, "survival mass never vanishes");
    }
}

#[test]
fn truncated_moments_agree_with_shorter_runs() {
    let t = table();
    let long = run_dp(&DpConfig::new(6, 30, Target::Primes).unwrap(), &t).unwrap();
    for k in [1u32, 2, 7, 19, 30] {
        let short = run_dp(&DpConfig::new(6, k, Target::Primes).unwrap(), &t).unwrap();
        let (e, e2, var) = long.truncated_moments(k);
        assert_eq!(e, short.e_k(), "E at depth {k}");
        assert_eq!(e2, short.e2_k(), "E2 at depth {k}");
        assert_eq!(var, short.var_k(), "Var at depth {k}");
    }
}

#[test]
fn explicit_target_walk_matches_hand_computation() {
    // Two-sided die, target {4}: layers worked out by hand.
    let config = DpConfig::new(2, 4, Target::Explicit(BTreeSet::from([4u64]))).unwrap();
    let series = run_dp(&config, &table()).unwrap();
    assert_eq!(series.p(1), Rational::from(1));
    assert_eq!(series.p(2), Rational::from(1)); // sums 1, 2 cannot be 4
    assert_eq!(series.p(3), Rational::from((3, 4)));
    assert_eq!(series.p(4), Rational::from((3, 8)));
}

#[test]
fn layers_match_independent_enumeration_to_depth_5() {
    // Walk all 6^5 = 7776 sequences with plain integers; no shared code with
    // the DP (or with the deeper enumeration in the verification sweeps).
    let t = table();
    let depth = 5usize;
    let mut occupancy = vec![std::collections::BTreeMap::<u64, u64>::new(); depth];
    let mut rolls = vec![1u64; depth];
    'outer: loop {
        let mut sum = 0;
        for (i, r) in rolls.iter().enumerate() {
            sum += r;
            if t.is_prime(sum) {
                break;
            }
            *occupancy[i].entry(sum).or_insert(0) += 1;
        }
        // Odometer increment over the roll tuple.
        for i in (0..depth).rev() {
            if rolls[i] < 6 {
                rolls[i] += 1;
                continue 'outer;
            }
            rolls[i] = 1;
        }
        break;
    }
    // Dividing layer j's path counts by 6^(depth - j - 1) converts "paths of
    // length `depth` surviving through step j+1" into layer numerators.
    let config = DpConfig::new(6, depth as u32, Target::Primes).unwrap();
    let mut layers = Vec::new();
    primehit::run_dp_with(&config, &t, |layer| layers.push(layer.clone())).unwrap();
    for (j, counts) in occupancy.iter().enumerate() {
        let scale = 6u64.pow((depth - j - 1) as u32);
        let layer = &layers[j];
        let got: Vec<(u64, u64)> = layer
            .support()
            .map(|(n, v)| (n, v.to_u64().unwrap()))
            .collect();
        let expected: Vec<(u64, u64)> = counts.iter().map(|(&n, &c)| (n, c / scale)).collect();
        assert_eq!(got, expected, "layer {} mismatch", j + 1);
        assert!(
            counts.values().all(|c| c % scale == 0),
            "path counts must be multiples of the tail fan-out"
        );
    }
}

#[test]
#[should_panic(expected = "series index")]
fn series_index_zero_is_rejected() {
    let config = DpConfig::new(6, 3, Target::Primes).unwrap();
    let series = run_dp(&config, &table()).unwrap();
    let _ = series.p_numerator(0);
}
