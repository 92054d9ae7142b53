//! Vinberg's algorithm on U + <-114>: enumerate roots outward by
//! height, then read the fundamental polygon off the accepted roots as
//! two chains of pairwise-adjacent walls.
//!
//!     cargo run --release --example vinberg_chains

use refl3::vinberg::{run_classification, LatticeForm, ReflectivityVerdict};

fn main() {
    let form = LatticeForm::UPlus { k: 57 };
    let cls = run_classification(form, 50000, Some(0));

    println!("{} roots up to height 50000\n", cls.roots.len());

    println!("principal chain ({} walls):", cls.chains.e.roots.len());
    for r in &cls.chains.e.roots {
        println!("  {r}");
    }
    println!("Gram matrix:");
    for row in &cls.chains.e.gram {
        println!("  {row:?}");
    }

    let f = cls.chains.f.as_ref().expect("second chain");
    println!("\ncounter-chain ({} walls), Gram diagonal:", f.roots.len());
    println!(
        "  {:?}",
        (0..f.roots.len()).map(|i| f.gram[i][i]).collect::<Vec<_>>()
    );

    match &cls.verdict {
        ReflectivityVerdict::Hyperbolic { weyl, period } => {
            println!("\nthe chains never close: a glide symmetry shifts them along");
            println!("period C =");
            println!("{period}");
            println!("axis (fixed up to sign): {weyl:?}");
        }
        other => println!("\nunexpected verdict {other:?}"),
    }
}
