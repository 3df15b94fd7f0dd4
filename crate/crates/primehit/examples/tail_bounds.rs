//! The raw tail bounds behind the certified intervals, and how the tuning
//! knobs move them.
//!
//! Run with: cargo run --release --example tail_bounds

use primehit::{bound_r, bound_r2, build_prime_table, TailOptions};
use rug::float::Round;
use rug::Float;

fn show(label: &str, x: &Float) {
    // Rounded up, so the printed 6 digits are themselves a bound.
    println!(
        "  {label} <= {}",
        x.to_string_radix_round(10, Some(6), Round::Up)
    );
}

fn main() {
    let table = build_prime_table(100_000).expect("sieve");

    // Terms past 2e4 are below 1e-140; cutting there barely moves the bound.
    let quick = TailOptions {
        n_cut: 20_000,
        ..TailOptions::default()
    };
    let r = bound_r(1000, &table, &quick).expect("bound");
    let r2 = bound_r2(1000, &table, &quick).expect("bound");
    println!("remainder bounds at K = 1000 (n_cut = 2e4):");
    show("R_upper ", &r);
    show("R2_upper", &r2);

    // The exact prime count sharpens the exponent wherever the sieve reaches.
    let sharp = TailOptions {
        sharp_pi: true,
        ..quick.clone()
    };
    let r_sharp = bound_r(1000, &table, &sharp).expect("bound");
    println!();
    println!("with the exact-count exponent instead of the 0.9 n / ln n surrogate:");
    show("R_upper ", &r_sharp);

    // Leaving everything to the doubling blocks is still sound, just cruder.
    let crude = TailOptions {
        n_cut: 1_000,
        ..TailOptions::default()
    };
    let r_crude = bound_r(1000, &table, &crude).expect("bound");
    println!();
    println!("block-majorant only (n_cut at K), much weaker but still certified:");
    show("R_upper ", &r_crude);

    println!();
    println!("growing K collapses the remainder:");
    for k in [1000, 1500, 2000] {
        let b = bound_r(k, &table, &quick).expect("bound");
        println!(
            "  K = {k}: R_upper <= {}",
            b.to_string_radix_round(10, Some(6), Round::Up)
        );
    }
}
