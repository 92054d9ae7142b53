//! Splitting the class group of a fundamental discriminant into genera
//! and counting ambiguous (type I / type II) and non-ambiguous classes.
//!
//!     cargo run --release --example genus_counts

use refl3::binquad::{class_number, genus_counts, is_realizable, tau, GenusLabel};
use refl3::intarith::factorize;

fn main() {
    // Every genus of D = -1155 = -3*5*7*11: the tag is a bitmask of
    // local invariants at the odd primes.
    let d = -1155i64;
    let k = factorize(d.unsigned_abs())
        .iter()
        .filter(|&&(p, _)| p != 2)
        .count();
    let h = class_number(d);
    let t = tau(d);
    println!("D = {d}: h = {h}, tau = {t}, {k} odd primes\n");
    println!("  mu   realizable   hrI  hrII  hnr");

    let mut identity_checks = 0;
    for mu in 0..1u32 << k {
        let g = GenusLabel::new(d, mu).unwrap();
        if !is_realizable(g) {
            println!("{mu:>4}        no       -    -    -");
            continue;
        }
        let c = genus_counts(g);
        println!(
            "{mu:>4}       yes     {:>4} {:>4} {:>4}",
            c.hr_i, c.hr_ii, c.hnr
        );
        // Each realizable genus carries the same number of classes.
        assert_eq!(c.hr_i + c.hr_ii + 2 * c.hnr, h >> t);
        identity_checks += 1;
    }
    println!("\ngenus identity hrI + hrII + 2*hnr = h/2^tau held {identity_checks} times");
}
