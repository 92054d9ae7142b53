//! Reflectivity of rank-3 hyperbolic lattices.
//!
//! The library decides, for an even hyperbolic lattice of signature (1,2),
//! whether its automorphism group is generated by reflections up to finite
//! index, and enumerates the arithmetic invariants that control the answer:
//!
//! * [`intarith`] — integer primitives: Kronecker symbol, factorization,
//!   divisor iteration, exact integer square roots, Smith normal form.
//! * [`binquad`] — class numbers of negative discriminants and counts of
//!   ambiguous / non-ambiguous form classes per genus.
//! * [`lattice3`] — existence of main rank-3 lattices with squarefree
//!   determinant, the count `hnr(d, eta)` of non-reflective central
//!   symmetry classes, and the search for lattices with `hnr <= 1`.
//! * [`narrow`] — enumeration of squared Gram matrices of narrow places of
//!   fundamental polygons (types I1, I0, II1, II0, III) and the divisor
//!   filter that pins down which main lattices admit a type II0 place.
//! * [`vinberg`] — Vinberg's algorithm for the three standard families of
//!   forms, chain extraction for the fundamental polygon, and the
//!   infinite-order symmetry test that certifies non-reflectivity.
//! * [`cli`] — the command-line front end (`refl3 <subcommand>`), run
//!   manifests, and the class-number cache file.
//!
//! Each capability has a runnable demonstration under `examples/`:
//! `class_numbers`, `genus_counts`, `central_symmetries`, `low_hnr_table`,
//! `narrow_places`, `main_filter`, `vinberg_chains`, `reflectivity`.

pub mod binquad;
pub mod cli;
pub mod intarith;
pub mod lattice3;
pub mod narrow;
pub mod vinberg;
