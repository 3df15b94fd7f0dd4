//! Exact truncated moments of the stopping time, as big rationals.
//!
//! Run with: cargo run --release --example exact_moments

use primehit::{build_prime_table, render_decimal, run_dp, DpConfig, RoundMode, Target};

fn main() {
    let k_max = 50;
    let config = DpConfig::new(6, k_max, Target::Primes).expect("valid configuration");
    let table = build_prime_table(config.required_table_limit()).expect("sieve");
    let series = run_dp(&config, &table).expect("recursion");

    println!("survival series p(k) = P(tau >= k), truncated at K = {k_max}:");
    for k in [1, 2, 3, 5, 10, 20, 50] {
        println!(
            "  p({k:2}) = {} / 6^{} = {}",
            series.p_numerator(k),
            series.denominator_exponent(k),
            render_decimal(&series.p(k), 12, RoundMode::Nearest),
        );
    }

    println!();
    println!("tail-summed moments of min(tau, K):");
    println!(
        "  E_K   = {}",
        render_decimal(&series.e_k(), 15, RoundMode::Nearest)
    );
    println!(
        "  E2_K  = {}",
        render_decimal(&series.e2_k(), 15, RoundMode::Nearest)
    );
    println!(
        "  Var_K = {}",
        render_decimal(&series.var_k(), 15, RoundMode::Nearest)
    );

    // Every prefix of the recursion is itself an exact truncation.
    let (e_10, _, var_10) = series.truncated_moments(10);
    println!();
    println!(
        "at K = 10 the truncation is already close: E_10 = {}, Var_10 = {}",
        render_decimal(&e_10, 15, RoundMode::Nearest),
        render_decimal(&var_10, 15, RoundMode::Nearest),
    );
}
