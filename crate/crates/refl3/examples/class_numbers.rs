//! Class numbers of imaginary quadratic fields, computed two ways:
//! the Dirichlet analytic formula and a direct count of reduced forms.
//!
//!     cargo run --release --example class_numbers

use refl3::binquad::{class_number, class_number_4d, class_number_reduced, is_fundamental};

fn main() {
    println!("   D      h(D)   reduced-form count");
    for d in [-3, -4, -7, -8, -20, -23, -47, -71, -163, -456, -1155] {
        assert!(is_fundamental(d));
        let h = class_number(d);
        let r = class_number_reduced(d);
        println!("{d:>6} {h:>8} {r:>14}");
        assert_eq!(h, r);
    }

    // The non-maximal order of discriminant 4D enters the count of
    // central symmetries whenever D is odd.
    for d in [-3, -7, -15] {
        println!("h({d}) = {},  h(4*{d}) = {}", class_number(d), class_number_4d(d));
    }
}
