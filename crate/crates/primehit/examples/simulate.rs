//! Seeded Monte Carlo cross-check of the exact recursion.
//!
//! Run with: cargo run --release --example simulate

use primehit::sim::DEFAULT_CAP;
use primehit::{build_prime_table, run_dp, run_simulation, DpConfig, Target};

fn main() {
    let table = build_prime_table(DEFAULT_CAP * 6).expect("sieve");

    let reps = 2_000_000;
    let seed = 42;
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let summary = run_simulation(reps, seed, 6, &table, workers, DEFAULT_CAP).expect("simulation");

    println!("simulation: {reps} replications, seed {seed}, {workers} workers");
    println!("  mean(tau)     = {:.6}", summary.mean);
    println!("  variance(tau) = {:.6}", summary.variance);
    println!("  max(tau)      = {}", summary.max);
    println!("  cap overflow  = {}", summary.cap_overflow);

    // The same seed gives the same summary for any worker count; only the
    // batch order changes, and merging is order-insensitive in exact integers.
    let again = run_simulation(reps, seed, 6, &table, 1, DEFAULT_CAP).expect("simulation");
    assert_eq!(summary, again);
    println!("  (bit-identical when re-run single-threaded)");

    let config = DpConfig::new(6, 200, Target::Primes).expect("valid configuration");
    let series = run_dp(&config, &table).expect("recursion");
    let exact = series.e_k().to_f64();
    println!();
    println!(
        "exact E_200 = {exact:.6}; sample mean is off by {:+.6}",
        summary.mean - exact
    );

    println!();
    println!("head of the hitting-time distribution (sampled vs exact):");
    for k in 1..=6 {
        let sampled = summary.histogram[k - 1] as f64 / reps as f64;
        let exact_pk = series.p(k as u32).to_f64() - series.p(k as u32 + 1).to_f64();
        println!("  P(tau = {k}) ~ {sampled:.6}   exact {exact_pk:.6}");
    }
}
