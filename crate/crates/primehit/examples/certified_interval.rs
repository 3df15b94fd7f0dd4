//! Certified enclosures for E(tau) and Var(tau): exact truncation at K = 1000
//! plus directed-rounding tail bounds. Takes a few seconds.
//!
//! Run with: cargo run --release --example certified_interval

use primehit::{
    build_prime_table, certify, render_decimal, run_dp, DpConfig, RoundMode, TailOptions, Target,
};

fn main() {
    // The tail analysis leans on pi(n) > 0.9 n / ln n, which certify checks
    // against the sieve over its whole range before trusting any bound.
    let table = build_prime_table(10_000_000).expect("sieve");
    let config = DpConfig::new(6, 1000, Target::Primes).expect("valid configuration");
    let series = run_dp(&config, &table).expect("recursion");
    let report = certify(&series, &table, &TailOptions::default()).expect("certification");

    println!(
        "certified at K = {} with {} bit directed rounding:",
        report.k, report.precision_bits
    );
    println!(
        "  E(tau)   in [{}, {}]",
        render_decimal(&report.e_interval.0, 12, RoundMode::Down),
        render_decimal(&report.e_interval.1, 12, RoundMode::Up),
    );
    println!(
        "  Var(tau) in [{}, {}]",
        render_decimal(&report.var_interval.0, 12, RoundMode::Down),
        render_decimal(&report.var_interval.1, 12, RoundMode::Up),
    );

    println!();
    println!("inputs the enclosure depends on:");
    for assumption in &report.assumptions {
        println!("  - {assumption}");
    }
}
