//! Narrow places of fundamental polygons: point configurations on two
//! infinite edges, their squared Gram matrices, and the rank-3 forms
//! they induce.  The five configuration types are enumerated exactly.
//!
//!     cargo run --release --example narrow_places

use refl3::narrow::{enumerate_narrow, narrow_stats, NarrowType};

fn main() {
    println!("type     places   max a   max a1   max a2");
    for tag in [NarrowType::I1, NarrowType::II1] {
        let s = narrow_stats(tag);
        println!("{tag:<5} {:>9} {:>7} {:>8} {:>8}", s.n, s.a, s.a1, s.a2);
    }

    // The first records of the smallest family, in canonical order.
    println!("\nfirst three I1 records:");
    let mut left = 3;
    enumerate_narrow(NarrowType::I1, |rec| {
        println!("  alpha  = {:?}", rec.alpha);
        println!("  cartan = {}", serde_json::to_string(&rec.cartan).unwrap());
        println!("  lambda = {}", serde_json::to_string(&rec.lambda).unwrap());
        println!("  b      = {:?}   a(b) = {}\n", rec.b, rec.a);
        left -= 1;
        left > 0
    });
}
