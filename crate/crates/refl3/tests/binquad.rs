use rayon::prelude::*;
use refl3::binquad::{
    append_class_cache, class_number, class_number_4d, class_number_reduced, genus_counts,
    genus_counts_strict, is_fundamental, is_realizable, load_class_cache, tau, GenusLabel,
};
use refl3::intarith::factorize;

fn fundamentals(limit: i64) -> Vec<i64> {
    (-limit..=-3).filter(|&d| is_fundamental(d)).collect()
}

#[test]
fn dirichlet_matches_reduced_forms() {
    // Two independent routes to h(D): the character sum (resp. the
    // three-case overlattice count for D = 4 mod 16) versus direct
    // enumeration of reduced primitive forms.
    let bad: Vec<i64> = fundamentals(5000)
        .par_iter()
        .copied()
        .filter(|&d| class_number(d) != class_number_reduced(d))
        .collect();
    assert_eq!(bad, Vec::<i64>::new());
}

#[test]
fn overlattice_count_matches_reduced_forms() {
    for d in fundamentals(2000) {
        if d.rem_euclid(4) == 1 {
            assert_eq!(
                class_number_4d(d),
                class_number_reduced(4 * d),
                "4D overlattice count at D = {d}"
            );
        }
    }
}

#[test]
fn genus_partition_invariants() {
    // For every fundamental D != -4 and every tag mu:
    //  - exactly 2^tau of the tags are realizable;
    //  - the realizable ones split h(D) evenly and carry all 2^tau
    //    ambiguous classes between them;
    //  - unrealizable tags carry no ambiguous class.
    for d in fundamentals(5000) {
        if d == -4 {
            continue;
        }
        let t = tau(d);
        let h = class_number(d);
        assert_eq!(h % (1u64 << t), 0, "2^tau | h fails at {d}");
        let per_genus = h >> t;
        let k = factorize(d.unsigned_abs())
            .iter()
            .filter(|&&(p, _)| p != 2)
            .count() as u32;
        let mut realizable = 0u64;
        let mut ambiguous = 0u64;
        for mu in 0..1u32 << k {
            let g = GenusLabel::new(d, mu).unwrap();
            let c = genus_counts(g);
            if is_realizable(g) {
                realizable += 1;
                ambiguous += c.hr_i + c.hr_ii;
                let strict = genus_counts_strict(g).unwrap();
                assert_eq!(strict, c);
                assert_eq!(
                    c.hr_i + c.hr_ii + 2 * c.hnr,
                    per_genus,
                    "genus size mismatch at ({d}, {mu})"
                );
            } else {
                assert_eq!((c.hr_i, c.hr_ii), (0, 0), "phantom ambiguous class at ({d}, {mu})");
                assert!(genus_counts_strict(g).is_err());
            }
        }
        assert_eq!(realizable, 1 << t, "realizable tag count at {d}");
        assert_eq!(ambiguous, 1 << t, "total ambiguous classes at {d}");
    }
}

#[test]
fn ambiguous_type_matches_two_adic_branch() {
    // Type II ambiguous classes only occur for D = 1 mod 4 or D = -4 mod 16;
    // type I only for D = 0 mod 4.
    for d in fundamentals(3000) {
        let k = factorize(d.unsigned_abs())
            .iter()
            .filter(|&&(p, _)| p != 2)
            .count() as u32;
        for mu in 0..1u32 << k {
            let c = genus_counts(GenusLabel::new(d, mu).unwrap());
            if d.rem_euclid(4) == 1 {
                assert_eq!(c.hr_i, 0);
            } else if d.rem_euclid(16) != 12 {
                assert_eq!(c.hr_ii, 0);
            }
        }
    }
}

#[test]
fn cache_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hcache");
    std::fs::write(&path, "-100003 77\n").unwrap();
    assert_eq!(load_class_cache(&path).unwrap(), 1);
    // the preloaded value short-circuits the character sum
    assert_eq!(class_number(-100003), 77);
    append_class_cache(&path).unwrap();
    let body = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        body.lines().filter(|l| *l == "-100003 77").count(),
        1,
        "append must not duplicate entries already on disk"
    );
    // idempotent: a second append adds nothing new for this key
    append_class_cache(&path).unwrap();
    let body = std::fs::read_to_string(&path).unwrap();
    assert_eq!(body.lines().filter(|l| *l == "-100003 77").count(), 1);
    assert_eq!(load_class_cache(&path).unwrap(), body.lines().count());
}
