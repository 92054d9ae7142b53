//! The table of main lattices with hnr <= 1 — the candidates for
//! reflectivity.  Scanning to d = 5000 finds all 206 of them; the
//! largest determinant is 4466, and wider scans find nothing new.
//!
//!     cargo run --release --example low_hnr_table

use refl3::lattice3::{enumerate_exact_hnr, enumerate_low_hnr};

fn main() {
    let table = enumerate_low_hnr(5000, 1);
    println!("{} pairs with hnr <= 1 and d <= 5000", table.len());
    println!(
        "largest determinant: {}",
        table.iter().map(|e| e.d).max().unwrap()
    );

    println!("\nfirst rows:");
    for e in &table[..8] {
        println!("  d = {:>4}  eta = {}  hnr = {}", e.d, e.eta, e.h);
    }
    println!("last rows:");
    for e in &table[table.len() - 3..] {
        println!("  d = {:>4}  eta = {}  hnr = {}", e.d, e.eta, e.h);
    }

    // Just past the candidates sits a sparse band with hnr exactly 2.
    let band = enumerate_exact_hnr(6000, 2);
    println!("\n{} pairs with hnr = 2 and d <= 6000, e.g.:", band.len());
    for e in band.iter().rev().take(3) {
        println!("  d = {:>4}  eta = {}", e.d, e.eta);
    }
}
