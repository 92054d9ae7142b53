//! Acceptance gate: one test, nine criteria, one pass/fail line each.
//!
//! Every published figure the library claims to reproduce is checked
//! here against data frozen locally in this file, independent of the
//! copies the library or the other suites carry.  Run with
//! `cargo test --test acceptance -- --nocapture` to watch the lines
//! appear as each criterion completes.  Set `REFL3_ACCEPT_FULL=1` to
//! extend criterion 3 to the full d <= 100000 sweep (hours).

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::prelude::*;
use rayon::prelude::*;
use refl3::binquad::{self, GenusLabel};
use refl3::intarith::{exponent_of_discriminant, factorize, gcd_i128};
use refl3::lattice3::{enumerate_exact_hnr, enumerate_low_hnr, hnr};
use refl3::narrow::{enumerate_main_triplets, enumerate_narrow, f_p2, f_p3, narrow_stats, NarrowType};
use refl3::vinberg::{
    classify_reflectivity, enumerate_roots, find_pair_automorphism, integral_eigenvectors, norm,
    pairing, pairing_scaled, run_classification, Isometry, LatticeForm, ReflectivityVerdict,
    RootVec,
};

// -------------------------------------------------------------------
// frozen reference data, local to the gate

const HNR_SPOTS: [(u64, u32, u64); 3] = [(114, 2, 0), (3990, 4, 1), (57, 1, 1)];

const LOW_HNR_COUNT: usize = 206;
const LOW_HNR_MAX_D: u64 = 4466;

/// Ten largest-d pairs with hnr = 2 below 30000, ascending.
const H2_TAIL: [(u64, u32); 10] = [
    (4290, 1),
    (4326, 2),
    (4902, 4),
    (4991, 7),
    (5226, 0),
    (5334, 2),
    (6006, 2),
    (7590, 8),
    (10374, 2),
    (29526, 2),
];

/// (count, max exponent, max odd radical, max prime) per stream.
const NARROW_STATS: [(NarrowType, (u64, u64, u64, u64)); 5] = [
    (NarrowType::I1, (272, 3528, 543, 181)),
    (NarrowType::I0, (2998, 69192, 10209, 89)),
    (NarrowType::II1, (9818, 47432, 10965, 487)),
    (NarrowType::II0, (376208, 995316, 238569, 283)),
    (NarrowType::III, (200539, 324900, 26565, 907)),
];

const MAIN_COUNT: usize = 132;

/// Invariant pairs settled by direct reflection runs; the overlattice
/// filter must reject every one of them.
const DIRECT_CHECK_PAIRS: [(u64, u32); 39] = [
    (57, 1),
    (65, 3),
    (71, 0),
    (119, 3),
    (161, 1),
    (182, 3),
    (194, 0),
    (246, 0),
    (259, 3),
    (266, 0),
    (266, 3),
    (285, 1),
    (299, 3),
    (326, 0),
    (335, 0),
    (354, 2),
    (386, 0),
    (407, 0),
    (506, 0),
    (530, 0),
    (534, 0),
    (546, 2),
    (602, 3),
    (645, 6),
    (714, 6),
    (777, 6),
    (854, 3),
    (897, 5),
    (897, 7),
    (935, 6),
    (966, 2),
    (1106, 1),
    (1254, 4),
    (1394, 3),
    (1659, 2),
    (2210, 6),
    (3311, 1),
    (3990, 4),
    (4466, 1),
];

const U114_CHAIN_E: [[i64; 3]; 7] = [
    [321, 30, -13],
    [28, 2, -1],
    [57, 0, -1],
    [0, 0, 1],
    [-1, 1, 0],
    [9, 6, -1],
    [292, 122, -25],
];

const U114_GRAM_E: [[i64; 7]; 7] = [
    [-6, 0, 228, 1482, 291, 714, 10872],
    [0, -2, 0, 114, 26, 72, 1150],
    [228, 0, -114, 114, 57, 228, 4104],
    [1482, 114, 114, -114, 0, 114, 2850],
    [291, 26, 57, 0, -2, 3, 170],
    [714, 72, 228, 114, 3, -6, 0],
    [10872, 1150, 4104, 2850, 170, 0, -2],
];

const U114_CHAIN_F: [[i64; 3]; 9] = [
    [1766, 172, -73],
    [6384, 627, -265],
    [4560, 456, -191],
    [283, 29, -12],
    [18, 3, -1],
    [14, 4, -1],
    [456, 171, -37],
    [2280, 912, -191],
    [427, 173, -36],
];

const U114_GRAM_F: [[i64; 9]; 9] = [
    [-2, 0, 114, 26, 72, 1150, 72504, 413250, 79370],
    [0, -114, 114, 57, 228, 4104, 259806, 1481658, 284601],
    [114, 114, -114, 0, 114, 2850, 182058, 1039566, 199728],
    [26, 57, 0, -2, 3, 170, 11001, 62928, 12094],
    [72, 228, 114, 3, -6, 0, 228, 1482, 291],
    [1150, 4104, 2850, 170, 0, -2, 0, 114, 26],
    [72504, 259806, 182058, 11001, 228, 0, -114, 114, 57],
    [413250, 1481658, 1039566, 62928, 1482, 114, 114, -114, 0],
    [79370, 284601, 199728, 12094, 291, 26, 57, 0, -2],
];

const U114_PERIOD: [[i64; 3]; 3] = [
    [2209, 22800, 107160],
    [912, 9409, 44232],
    [-188, -1940, -9119],
];

const U114_GLIDE: [[i64; 3]; 3] = [[48, 475, 2280], [19, 192, 912], [-4, -40, -191]];

const U114_AXIS: [i64; 3] = [95, 19, -6];
const U114_AXIS_NORM: i64 = -494;

/// Doubled coordinates of the 33 glued-lattice roots, in height order.
const GLUED_ROOTS: [[i64; 3]; 33] = [
    [0, 2, 0],
    [0, 0, 2],
    [1, -1, 0],
    [4, 0, -6],
    [13, -9, -12],
    [14, -6, -18],
    [57, -21, -76],
    [17, -9, -20],
    [56, -42, -44],
    [63, -35, -72],
    [114, -74, -114],
    [50, -30, -54],
    [84, -28, -114],
    [34, -8, -48],
    [152, -116, -114],
    [38, -12, -52],
    [104, -30, -144],
    [168, -42, -236],
    [1729, -1015, -1900],
    [119, -69, -132],
    [69, -43, -72],
    [146, -114, -102],
    [148, -114, -108],
    [231, -147, -236],
    [2261, -1645, -1900],
    [202, -54, -282],
    [532, -264, -646],
    [238, -174, -198],
    [256, -126, -312],
    [399, -315, -268],
    [684, -192, -950],
    [722, -154, -1026],
    [476, -238, -576],
];

fn glued_period() -> Isometry {
    Isometry::from_rational_rows([
        [(6863, 2), (5339, 2), (1694, 1)],
        [(-3345, 2), (-2601, 2), (-826, 1)],
        [(-4200, 1), (-3268, 1), (-2073, 1)],
    ])
}

fn u114() -> LatticeForm {
    LatticeForm::UPlus { k: 57 }
}

fn glued_3990() -> LatticeForm {
    LatticeForm::Diag {
        n1: 30,
        n2: 38,
        n3: 14,
        eps: (1, 1, 0),
    }
}

fn iv(v: [i64; 3]) -> RootVec {
    RootVec::integral(v[0], v[1], v[2])
}

fn rv(t: [i64; 3]) -> RootVec {
    RootVec::halves(t)
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

/// Fail unless the body stayed inside the stated runtime target.
fn within(start: Instant, budget: Duration, detail: String) -> Result<String, String> {
    let took = start.elapsed();
    if took <= budget {
        Ok(format!("{detail}, {}", secs(took)))
    } else {
        Err(format!(
            "correct but took {} against a {} target",
            secs(took),
            secs(budget)
        ))
    }
}

// -------------------------------------------------------------------
// criteria

fn criterion_1() -> Result<String, String> {
    let start = Instant::now();
    let ds: Vec<i64> = (3..=20000)
        .map(|n| -n)
        .filter(|&d| binquad::is_fundamental(d))
        .collect();
    let mismatches: Vec<i64> = ds
        .par_iter()
        .copied()
        .filter(|&d| binquad::class_number(d) != binquad::class_number_reduced(d))
        .collect();
    if !mismatches.is_empty() {
        return Err(format!(
            "{} class-number route mismatches, first at D = {}",
            mismatches.len(),
            mismatches[0]
        ));
    }
    let genera: Vec<Result<u64, String>> = ds
        .par_iter()
        .copied()
        .map(|d| {
            if d == -4 {
                return Ok(0);
            }
            let k = factorize(d.unsigned_abs())
                .iter()
                .filter(|&&(p, _)| p != 2)
                .count() as u32;
            let h = binquad::class_number(d);
            let tau = binquad::tau(d);
            if h % (1 << tau) != 0 {
                return Err(format!("2^tau does not divide h({d})"));
            }
            let target = h >> tau;
            let mut n = 0;
            for mu in 0..1u32 << k {
                let g = GenusLabel::new(d, mu).map_err(|e| e.to_string())?;
                if !binquad::is_realizable(g) {
                    continue;
                }
                let c = binquad::genus_counts(g);
                if c.hr_i + c.hr_ii + 2 * c.hnr != target {
                    return Err(format!("genus identity fails at ({d}, {mu})"));
                }
                n += 1;
            }
            Ok(n)
        })
        .collect();
    let mut realizable = 0;
    for g in genera {
        realizable += g?;
    }
    within(
        start,
        Duration::from_secs(60),
        format!("{} discriminants, {realizable} realizable genera", ds.len()),
    )
}

fn criterion_2() -> Result<String, String> {
    let mut parts = vec![];
    for (d, eta, want) in HNR_SPOTS {
        let got = hnr(d, eta).map_err(|e| e.to_string())?;
        if got != want {
            return Err(format!("hnr({d},{eta}) = {got}, expected {want}"));
        }
        parts.push(format!("hnr({d},{eta})={got}"));
    }
    Ok(parts.join(", "))
}

fn criterion_3() -> Result<String, String> {
    let start = Instant::now();
    let table = enumerate_low_hnr(5000, 1);
    if table.len() != LOW_HNR_COUNT {
        return Err(format!("{} pairs at desk scale, expected {LOW_HNR_COUNT}", table.len()));
    }
    let max_d = table.iter().map(|e| e.d).max().unwrap_or(0);
    if max_d != LOW_HNR_MAX_D {
        return Err(format!("largest d is {max_d}, expected {LOW_HNR_MAX_D}"));
    }
    let sweep = if std::env::var_os("REFL3_ACCEPT_FULL").is_some() {
        let full = enumerate_low_hnr(100000, 1);
        if full != table {
            return Err(format!(
                "full sweep found {} pairs, desk scale found {}",
                full.len(),
                table.len()
            ));
        }
        "full sweep to 100000 identical"
    } else {
        "full sweep skipped (set REFL3_ACCEPT_FULL=1)"
    };
    within(
        start,
        Duration::from_secs(600),
        format!("{LOW_HNR_COUNT} pairs, largest d {LOW_HNR_MAX_D}, {sweep}"),
    )
}

fn criterion_4() -> Result<String, String> {
    let rows = enumerate_exact_hnr(30000, 2);
    if rows.len() < H2_TAIL.len() {
        return Err(format!("only {} pairs with hnr = 2", rows.len()));
    }
    let tail: Vec<(u64, u32)> = rows[rows.len() - H2_TAIL.len()..]
        .iter()
        .map(|e| (e.d, e.eta))
        .collect();
    if tail != H2_TAIL {
        return Err(format!("tail {tail:?} differs from the published ten"));
    }
    Ok(format!(
        "{} pairs with hnr = 2, tail ends at ({}, {})",
        rows.len(),
        H2_TAIL[9].0,
        H2_TAIL[9].1
    ))
}

fn criterion_5() -> Result<String, String> {
    let start = Instant::now();
    let mut total = 0;
    for (tag, (n, a, a1, a2)) in NARROW_STATS {
        let st = narrow_stats(tag);
        let got = (st.n, st.a, st.a1, st.a2);
        if got != (n, a, a1, a2) {
            return Err(format!("{tag}: {got:?}, expected {:?}", (n, a, a1, a2)));
        }
        total += n;
    }
    within(
        start,
        Duration::from_secs(600),
        format!("five streams, {total} places"),
    )
}

fn criterion_6() -> Result<String, String> {
    let survivors = enumerate_main_triplets();
    if survivors.len() != MAIN_COUNT {
        return Err(format!("{} survivors, expected {MAIN_COUNT}", survivors.len()));
    }
    let distinct: HashSet<(u64, u32, u64)> =
        survivors.iter().map(|t| (t.d, t.eta, t.h)).collect();
    if distinct.len() != MAIN_COUNT {
        return Err(format!("only {} distinct triplets", distinct.len()));
    }
    let table: HashSet<(u64, u32)> = enumerate_low_hnr(5000, 1)
        .iter()
        .map(|e| (e.d, e.eta))
        .collect();
    let pairs: HashSet<(u64, u32)> = survivors.iter().map(|t| (t.d, t.eta)).collect();
    for &p in &pairs {
        if !table.contains(&p) {
            return Err(format!("survivor {p:?} missing from the criterion-3 table"));
        }
    }
    for &p in &DIRECT_CHECK_PAIRS {
        if pairs.contains(&p) {
            return Err(format!("direct-check pair {p:?} survived the filter"));
        }
    }
    Ok(format!(
        "{MAIN_COUNT} triplets, all pairs tabulated, all {} direct-check pairs rejected",
        DIRECT_CHECK_PAIRS.len()
    ))
}

fn criterion_7() -> Result<String, String> {
    let start = Instant::now();
    let form = u114();
    let g = form.gram();
    let cls = run_classification(form, 50000, Some(0));

    let e: Vec<RootVec> = U114_CHAIN_E.iter().map(|&v| iv(v)).collect();
    if cls.chains.e.roots != e {
        return Err("principal chain differs".into());
    }
    let ge: Vec<Vec<i64>> = U114_GRAM_E.iter().map(|r| r.to_vec()).collect();
    if cls.chains.e.gram != ge {
        return Err("principal Gram matrix differs".into());
    }
    let Some(f) = &cls.chains.f else {
        return Err("counter-chain missing".into());
    };
    let fr: Vec<RootVec> = U114_CHAIN_F.iter().map(|&v| iv(v)).collect();
    if f.roots != fr {
        return Err("counter-chain differs".into());
    }
    let gf: Vec<Vec<i64>> = U114_GRAM_F.iter().map(|r| r.to_vec()).collect();
    if f.gram != gf {
        return Err("counter-chain Gram matrix differs".into());
    }

    let c = Isometry::from_integer_rows(U114_PERIOD);
    if find_pair_automorphism(&g, form, (e[0], e[1]), (e[5], e[6])) != Some(c.clone()) {
        return Err("chain-shift search missed the published period".into());
    }
    if integral_eigenvectors(&g, &c) != vec![(1, U114_AXIS, U114_AXIS_NORM)] {
        return Err("period eigenvectors differ from the published axis".into());
    }
    let c1 = Isometry::from_integer_rows(U114_GLIDE);
    if c1.mul(&c1) != c {
        return Err("glide square differs from the period".into());
    }
    match &cls.verdict {
        ReflectivityVerdict::Hyperbolic { weyl, period }
            if *weyl == U114_AXIS && *period == c => {}
        other => return Err(format!("verdict {other:?}")),
    }
    within(
        start,
        Duration::from_secs(60),
        format!(
            "{} roots, chains {}+{}, axis ({},{},{}) of square {}",
            cls.roots.len(),
            e.len(),
            fr.len(),
            U114_AXIS[0],
            U114_AXIS[1],
            U114_AXIS[2],
            U114_AXIS_NORM
        ),
    )
}

fn criterion_8() -> Result<String, String> {
    let start = Instant::now();
    let form = glued_3990();
    let g = form.gram();
    let roots = enumerate_roots(form, 500000);
    let want: HashSet<RootVec> = GLUED_ROOTS.iter().map(|&t| rv(t)).collect();
    let got: HashSet<RootVec> = roots.iter().copied().collect();
    if got != want || roots.len() != GLUED_ROOTS.len() {
        return Err(format!("{} roots, set differs from the published 33", roots.len()));
    }

    // Published period from the pairs (v11, v24) -> (v27, v33),
    // 1-indexed in height order.
    let v: Vec<RootVec> = GLUED_ROOTS.iter().map(|&t| rv(t)).collect();
    let c = glued_period();
    if find_pair_automorphism(&g, form, (v[10], v[23]), (v[26], v[32])) != Some(c.clone()) {
        return Err("pair search missed the published period".into());
    }
    if c.pow(12).is_identity() {
        return Err("period has finite order <= 12".into());
    }
    match classify_reflectivity(form, 500000, Some(1)) {
        ReflectivityVerdict::NotReflective { witness } if witness == vec![c] => {}
        other => return Err(format!("verdict {other:?}")),
    }
    within(
        start,
        Duration::from_secs(600),
        "33 roots, infinite-order period, not reflective".into(),
    )
}

/// Height numerator/denominator of a root, unreduced, on each
/// enumerator's own scale; constant factors cancel in comparisons.
fn height(form: LatticeForm, g: &[[i64; 3]; 3], r: RootVec) -> (i128, i128) {
    let den = -i128::from(norm(g, r));
    let num = match form {
        LatticeForm::UPlus { .. } => i128::from(r.num[1]) * i128::from(r.num[1]) / 2,
        LatticeForm::Diag { n1, .. } => i128::from(n1) * i128::from(r.num[0]) * i128::from(r.num[0]),
    };
    (num, den)
}

fn root_stream_invariants() -> Result<u64, String> {
    let cases: Vec<(LatticeForm, u64)> = vec![
        (u114(), 50000),
        (glued_3990(), 500000),
        (LatticeForm::UPlus { k: 1 }, 200),
        (
            LatticeForm::Diag {
                n1: 1,
                n2: 1,
                n3: 1,
                eps: (0, 0, 0),
            },
            500,
        ),
        (
            LatticeForm::Diag {
                n1: 2,
                n2: 4,
                n3: 6,
                eps: (1, 1, 1),
            },
            2000,
        ),
        (
            LatticeForm::Diag {
                n1: 2,
                n2: 6,
                n3: 4,
                eps: (1, 1, 0),
            },
            2000,
        ),
    ];
    let mut checked = 0;
    for (form, bound) in cases {
        let g = form.gram();
        let roots = enumerate_roots(form, bound);
        if roots.len() < 2 {
            return Err(format!("{form:?}: degenerate stream"));
        }
        let eps = match form {
            LatticeForm::UPlus { .. } => [0, 0, 0],
            LatticeForm::Diag { eps, .. } => [i64::from(eps.0), i64::from(eps.1), i64::from(eps.2)],
        };
        let mut gens = vec![iv([1, 0, 0]), iv([0, 1, 0]), iv([0, 0, 1])];
        if eps != [0, 0, 0] {
            gens.push(rv(eps));
        }
        let mut prev = (0i128, 1i128);
        for (idx, &r) in roots.iter().enumerate() {
            let sq = norm(&g, r);
            if sq >= 0 {
                return Err(format!("{form:?}: {r} has square {sq}"));
            }
            // Crystallographic: 2 (r, x) is a multiple of r^2 for
            // every lattice generator x.
            for &x in &gens {
                if pairing_scaled(&g, r, x).rem_euclid(2 * i128::from(-sq)) != 0 {
                    return Err(format!("{form:?}: {r} fails the crystallographic condition"));
                }
            }
            for &earlier in &roots[..idx] {
                if pairing_scaled(&g, earlier, r) < 0 {
                    return Err(format!("{form:?}: {earlier} and {r} separate"));
                }
            }
            let h = height(form, &g, r);
            if h.0 * prev.1 < prev.0 * h.1 {
                return Err(format!("{form:?}: height drops at {r}"));
            }
            prev = h;
            checked += 1;
        }
    }
    Ok(checked)
}

fn isometry_invariants() -> Result<(), String> {
    for (form, iso) in [
        (u114(), Isometry::from_integer_rows(U114_PERIOD)),
        (u114(), Isometry::from_integer_rows(U114_GLIDE)),
        (glued_3990(), glued_period()),
    ] {
        let g = form.gram();
        let basis = [iv([1, 0, 0]), iv([0, 1, 0]), iv([0, 0, 1])];
        let images: Vec<RootVec> = basis
            .iter()
            .map(|&b| iso.apply_doubled(b).ok_or("basis image leaves the half-lattice"))
            .collect::<Result<_, _>>()?;
        for i in 0..3 {
            for j in 0..3 {
                if pairing(&g, images[i], images[j]) != g[i][j] {
                    return Err(format!("C^T G C differs from G at ({i},{j}) on {form:?}"));
                }
            }
        }
    }
    Ok(())
}

fn grid_bounds() -> Result<u64, String> {
    let axis: Vec<f64> = (0..=100).map(|i| f64::from(i) / 100.0).collect();
    let mut cells = 0;
    for a1 in [0.28, 0.5, 0.75, 1.0] {
        for a2 in [0.28, 0.5, 0.75, 1.0] {
            for a3 in [0.16, 0.5, 1.0] {
                let best = axis
                    .iter()
                    .map(|&t| f_p2(a1, a2, a3, t))
                    .fold(f64::NEG_INFINITY, f64::max);
                let ends = f_p2(a1, a2, a3, 0.0).max(f_p2(a1, a2, a3, 1.0));
                if best > ends + 1e-9 {
                    return Err(format!(
                        "two-point bound: interior {best} beats ends {ends} at ({a1},{a2},{a3})"
                    ));
                }
                cells += 1;
            }
        }
    }
    let grid = [0.38, 0.5, 0.75, 1.0];
    for a1 in grid {
        for a2 in grid {
            for a3 in grid {
                for a4 in grid {
                    let mut best = f64::NEG_INFINITY;
                    for &s in &axis {
                        for &t in &axis {
                            best = best.max(f_p3(a1, a2, a3, a4, s, t));
                        }
                    }
                    let corners = f_p3(a1, a2, a3, a4, 0.0, 0.0)
                        .max(f_p3(a1, a2, a3, a4, 1.0, 0.0))
                        .max(f_p3(a1, a2, a3, a4, 1.0, 1.0));
                    if best > corners + 1e-9 {
                        return Err(format!(
                            "three-point bound: interior {best} beats corners {corners} \
                             at ({a1},{a2},{a3},{a4})"
                        ));
                    }
                    cells += 1;
                }
            }
        }
    }
    Ok(cells)
}

/// Smallest k with k * m^{-1} integral, straight from the adjugate:
/// the inverse entry cof(j,i)/det has reduced denominator
/// |det| / gcd(det, cof), and k is their lcm.  None when singular.
fn annihilator_exponent(m: &[[i128; 3]; 3]) -> Option<i128> {
    let cof = |i: usize, j: usize| -> i128 {
        let r = [(i + 1) % 3, (i + 2) % 3];
        let c = [(j + 1) % 3, (j + 2) % 3];
        m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]]
    };
    let det: i128 = (0..3).map(|j| m[0][j] * cof(0, j)).sum();
    if det == 0 {
        return None;
    }
    let mut k = 1i128;
    for i in 0..3 {
        for j in 0..3 {
            let den = (det / gcd_i128(det, cof(i, j))).abs();
            k = k / gcd_i128(k, den) * den;
        }
    }
    Some(k)
}

fn exponent_sanity() -> Result<u64, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_3001);
    let mut checked = 0;
    for tag in NarrowType::ALL {
        let mut recs = Vec::new();
        enumerate_narrow(tag, |r| {
            recs.push(r);
            recs.len() < 40
        });
        for rec in &recs {
            let n = rec.alpha.len();
            // The primitive rank-3 product is itself a nonsingular
            // 3x3 matrix; larger records also contribute random
            // nonsingular 3x3 submatrices of the point Gram.
            let mut mats: Vec<[[i128; 3]; 3]> = vec![];
            let mut b = [[0i128; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    b[i][j] = i128::from(rec.b[i][j]);
                }
            }
            mats.push(b);
            let indices: Vec<usize> = (0..n).collect();
            let tries = if n == 3 { 1 } else { 8 };
            let mut kept = 0;
            for _ in 0..tries {
                let rows: Vec<usize> = indices.choose_multiple(&mut rng, 3).copied().collect();
                let cols: Vec<usize> = indices.choose_multiple(&mut rng, 3).copied().collect();
                let mut sub = [[0i128; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        sub[i][j] = i128::from(rec.alpha[rows[i]][cols[j]]);
                    }
                }
                if annihilator_exponent(&sub).is_some() {
                    mats.push(sub);
                    kept += 1;
                    if kept == 4 {
                        break;
                    }
                }
            }
            for m in mats {
                let Some(k) = annihilator_exponent(&m) else {
                    return Err(format!("{tag}: singular matrix slipped through"));
                };
                let rows: Vec<Vec<i128>> = m.iter().map(|r| r.to_vec()).collect();
                if exponent_of_discriminant(&rows) != BigInt::from(k) {
                    return Err(format!("{tag}: Smith exponent differs from annihilator {k}"));
                }
                checked += 1;
            }
        }
    }
    if checked < 300 {
        return Err(format!("only {checked} matrices sampled"));
    }
    Ok(checked)
}

fn criterion_9() -> Result<String, String> {
    let streamed = root_stream_invariants()?;
    isometry_invariants()?;
    let cells = grid_bounds()?;
    let sampled = exponent_sanity()?;
    Ok(format!(
        "{streamed} streamed roots, 3 isometries, {cells} grid cells, {sampled} exponent samples"
    ))
}

// -------------------------------------------------------------------

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Result<String, String>); 9] = [
        ("genus class numbers and identity", criterion_1),
        ("central-symmetry spot values", criterion_2),
        ("low-hnr table", criterion_3),
        ("hnr = 2 tail", criterion_4),
        ("narrow-place counts", criterion_5),
        ("main-class filter", criterion_6),
        ("hyperbolic reference lattice", criterion_7),
        ("glued reference lattice", criterion_8),
        ("property suites", criterion_9),
    ];
    let mut failures = vec![];
    for (i, (name, body)) in criteria.iter().enumerate() {
        let n = i + 1;
        match body() {
            Ok(detail) => println!("PASS criterion {n}: {name} ({detail})"),
            Err(msg) => {
                println!("FAIL criterion {n}: {name} ({msg})");
                failures.push(format!("criterion {n} ({name}): {msg}"));
            }
        }
    }
    assert!(
        failures.is_empty(),
        "{} of 9 criteria failed:\n{}",
        failures.len(),
        failures.join("\n")
    );
}

#[test]
fn annihilator_route_is_minimal_on_a_known_cokernel() {
    // Z/2 x Z/6 block: exponent 6, not 12, despite determinant 12.
    let m = [[2, 0, 0], [0, 2, 2], [0, 2, -4]];
    assert_eq!(annihilator_exponent(&m), Some(6));
    assert_eq!(annihilator_exponent(&[[1, 0, 0], [0, 1, 0], [1, 1, 0]]), None);
    // Scalar cokernel (Z/5)^3: exponent 5, determinant 125.
    let s = [[5, 0, 0], [0, 5, 0], [0, 0, 5]];
    assert_eq!(annihilator_exponent(&s), Some(5));
}
