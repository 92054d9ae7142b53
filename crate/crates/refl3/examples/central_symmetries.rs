//! Counting the non-reflective central-symmetry classes hnr(d, eta) of
//! main rank-3 hyperbolic lattices.  A lattice with hnr = 0 whose
//! fundamental polygon closes is reflective; hnr = 1 leaves a single
//! candidate symmetry that the geometry must then rule in or out.
//!
//!     cargo run --release --example central_symmetries

use refl3::lattice3::{exists_main_lattice, hnr, LatticeInvariants};

fn main() {
    println!("   d  eta   hnr");
    for (d, eta) in [(114, 2), (3990, 4), (57, 1), (1, 0), (2730, 6)] {
        let inv = LatticeInvariants::new(d, eta).unwrap();
        println!("{:>5} {:>4} {:>5}", inv.d, inv.eta, hnr(d, eta).unwrap());
    }

    // Not every (d, eta) names a lattice: for even d the signature
    // congruence cuts the tag space in half.
    println!();
    for (d, eta) in [(6, 0), (6, 1)] {
        println!("(d, eta) = ({d}, {eta}) exists: {}", exists_main_lattice(d, eta).unwrap());
    }
}
