//! The self-check sweeps: every analytic ingredient of the tail bounds is
//! re-derived an independent way and compared.
//!
//! Run with: cargo run --release --example verification_sweeps

use primehit::build_prime_table;
use primehit::tail::DEFAULT_PRECISION_BITS;
use primehit::verify::run_all_sweeps;

fn main() {
    // The prime-count sweep covers everything the sieve reaches; a bigger
    // limit makes it a stronger statement and costs about a second per 1e7.
    let table = build_prime_table(1_000_000).expect("sieve");
    let sweeps = run_all_sweeps(&table, DEFAULT_PRECISION_BITS).expect("sweeps");

    for sweep in &sweeps {
        let status = if sweep.passed { "PASS" } else { "FAIL" };
        println!("{status} {}", sweep.name);
        println!("     {}", sweep.detail);
        if let Some(witness) = &sweep.witness {
            println!("     witness: {witness}");
        }
    }

    assert!(
        sweeps.iter().all(|s| s.passed),
        "a verification sweep failed"
    );
    println!();
    println!("all {} sweeps passed", sweeps.len());
}
