//! The three ways a rank-3 classification can end: the polygon closes
//! (reflective, elliptic type), a glide symmetry shifts an infinite
//! polygon along an axis (reflective, hyperbolic type), or an
//! infinite-order symmetry with no axis separation certifies that
//! reflections never reach finite index.
//!
//!     cargo run --release --example reflectivity

use refl3::vinberg::{classify_reflectivity, LatticeForm, ReflectivityVerdict};

fn main() {
    // U + <-2>: a triangle of walls closes up immediately.
    let verdict = classify_reflectivity(LatticeForm::UPlus { k: 1 }, 100, Some(0));
    match verdict {
        ReflectivityVerdict::Elliptic { p_m, .. } => {
            println!("U + <-2>          reflective (elliptic), polygon has {} walls", p_m.len());
        }
        other => println!("U + <-2>          unexpected: {other:?}"),
    }

    // U + <-114>: the polygon is infinite but periodic.
    let verdict = classify_reflectivity(LatticeForm::UPlus { k: 57 }, 50000, Some(0));
    match verdict {
        ReflectivityVerdict::Hyperbolic { weyl, .. } => {
            println!("U + <-114>        reflective (hyperbolic), axis {weyl:?}");
        }
        other => println!("U + <-114>        unexpected: {other:?}"),
    }

    // <30> + <-38> + <-14> glued by (1/2, 1/2, 0): one central symmetry
    // remains unaccounted for (hnr = 1), and the root configuration
    // admits an infinite-order symmetry with no separating axis.
    let form = LatticeForm::Diag {
        n1: 30,
        n2: 38,
        n3: 14,
        eps: (1, 1, 0),
    };
    let verdict = classify_reflectivity(form, 500000, Some(1));
    match verdict {
        ReflectivityVerdict::NotReflective { witness } => {
            println!("glued 30,38,14    not reflective; witness:");
            for c in &witness {
                println!("{c}");
            }
        }
        other => println!("glued 30,38,14    unexpected: {other:?}"),
    }
}
