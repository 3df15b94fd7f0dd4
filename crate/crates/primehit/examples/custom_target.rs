//! The exact recursion on a user-chosen absorbing set instead of the primes.
//!
//! Run with: cargo run --release --example custom_target

use std::collections::BTreeSet;

use primehit::{
    build_prime_table, certify, render_decimal, run_dp, DpConfig, Error, RoundMode, TailOptions,
    Target,
};

fn main() {
    // Stop when the running sum of a 4-sided die hits a perfect square.
    let squares: BTreeSet<u64> = (2u64..).map(|i| i * i).take_while(|&s| s <= 400).collect();
    let config = DpConfig::new(4, 60, Target::Explicit(squares)).expect("valid configuration");
    let table = build_prime_table(config.required_table_limit()).expect("sieve");
    let series = run_dp(&config, &table).expect("recursion");

    println!("4-sided die, absorbing on perfect squares, truncated at K = 60:");
    println!(
        "  E_K   = {}",
        render_decimal(&series.e_k(), 12, RoundMode::Nearest)
    );
    println!(
        "  Var_K = {}",
        render_decimal(&series.var_k(), 12, RoundMode::Nearest)
    );
    for k in [1, 2, 3, 4, 10] {
        println!(
            "  p({k:2}) = {}",
            render_decimal(&series.p(k), 12, RoundMode::Nearest)
        );
    }

    // The certified tail analysis is specific to primes on a 6-sided die, so
    // custom targets get the exact truncation only and a refusal here.
    match certify(&series, &table, &TailOptions::default()) {
        Err(Error::CertificationUnavailable(reason)) => {
            println!();
            println!("tail certification refused as expected:");
            println!("  {reason}");
        }
        other => panic!("expected a refusal, got {other:?}"),
    }
}
