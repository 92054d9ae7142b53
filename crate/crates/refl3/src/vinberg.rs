//! Vinberg's algorithm for rank-3 hyperbolic lattices: enumerate the
//! roots of the fundamental polygon in height order, extract the side
//! chains, and decide whether the reflection group has finite
//! covolume.
//!
//! Two lattice shapes are supported ([`LatticeForm`]): `U + <-2k>`
//! (hyperbolic plane plus a negative line) and
//! `<n1> + <-n2> + <-n3>`, the latter optionally extended by an
//! index-two glue vector with half-integral coordinates.  Roots are
//! kept in doubled coordinates ([`RootVec`]) so glued lattices never
//! need rational arithmetic on the enumeration path.
//!
//! The verdict machinery ([`classify_reflectivity`]) closes the
//! polygon directly when possible and otherwise hunts for an
//! infinite-order symmetry of the root system: a pair automorphism
//! that shifts the chain along itself.  Class numbers are never
//! computed here; the one branch that needs `hnr` takes it from the
//! caller.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::fmt;

use crate::intarith::{content, content_i128, divisors, gcd, lcm, sqrt_exact};

/// Shape of a rank-3 hyperbolic lattice accepted by the enumerator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeForm {
    /// `U + <-2k>`: Gram rows `(0,1,0), (1,0,0), (0,0,-2k)`.
    UPlus { k: i64 },
    /// `<n1> + <-n2> + <-n3>`, glued by `(e1/2, e2/2, e3/2)` when
    /// `eps != (0,0,0)`.
    Diag {
        n1: i64,
        n2: i64,
        n3: i64,
        eps: (u8, u8, u8),
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("lattice scale parameters must be positive")]
    NonPositive,
    #[error("glue entries must be 0 or 1")]
    BadGlueEntry,
    #[error("glue vector needs at least two nonzero entries")]
    ShortGlue,
    #[error("glue demands an even scale at every nonzero entry")]
    OddGlueScale,
    #[error("glue vector has non-integral norm")]
    FractionalGlueNorm,
}

impl LatticeForm {
    pub fn validate(self) -> Result<(), FormError> {
        match self {
            LatticeForm::UPlus { k } => {
                if k <= 0 {
                    return Err(FormError::NonPositive);
                }
            }
            LatticeForm::Diag { n1, n2, n3, eps } => {
                if n1 <= 0 || n2 <= 0 || n3 <= 0 {
                    return Err(FormError::NonPositive);
                }
                let e = [eps.0, eps.1, eps.2];
                if e.iter().any(|&x| x > 1) {
                    return Err(FormError::BadGlueEntry);
                }
                let nonzero = e.iter().filter(|&&x| x == 1).count();
                if nonzero == 0 {
                    return Ok(());
                }
                if nonzero == 1 {
                    return Err(FormError::ShortGlue);
                }
                let n = [n1, n2, n3];
                // Integral pairings with the generators need 2 | n_i
                // wherever the glue coordinate is 1/2.
                if (0..3).any(|i| e[i] == 1 && n[i] % 2 != 0) {
                    return Err(FormError::OddGlueScale);
                }
                // Integral norm: 4 | n1*e1 - n2*e2 - n3*e3.
                let norm4 = n1 * i64::from(e[0]) - n2 * i64::from(e[1]) - n3 * i64::from(e[2]);
                if norm4 % 4 != 0 {
                    return Err(FormError::FractionalGlueNorm);
                }
            }
        }
        Ok(())
    }

    pub fn gram(self) -> [[i64; 3]; 3] {
        match self {
            LatticeForm::UPlus { k } => [[0, 1, 0], [1, 0, 0], [0, 0, -2 * k]],
            LatticeForm::Diag { n1, n2, n3, .. } => [[n1, 0, 0], [0, -n2, 0], [0, 0, -n3]],
        }
    }

    fn eps_vec(self) -> [i64; 3] {
        match self {
            LatticeForm::UPlus { .. } => [0, 0, 0],
            LatticeForm::Diag { eps, .. } => [i64::from(eps.0), i64::from(eps.1), i64::from(eps.2)],
        }
    }

    /// A fixed positive-square vector anchoring the future cone; for
    /// `UPlus` it sits in the same component as the isotropic center
    /// `(1,0,0)`.
    fn cone_anchor(self) -> [i64; 3] {
        match self {
            LatticeForm::UPlus { .. } => [1, 1, 0],
            LatticeForm::Diag { .. } => [1, 0, 0],
        }
    }

    /// Membership of a doubled-coordinate vector: integral, or in the
    /// glue class.
    fn contains_doubled(self, t: [i64; 3]) -> bool {
        if t.iter().all(|x| x % 2 == 0) {
            return true;
        }
        let e = self.eps_vec();
        e != [0, 0, 0] && (0..3).all(|i| t[i].rem_euclid(2) == e[i])
    }
}

/// Lattice vector in doubled coordinates: the semantic coordinates
/// are `num[i] / 2`, so glue-class vectors stay integral here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootVec {
    pub num: [i64; 3],
}

impl RootVec {
    pub fn integral(x: i64, y: i64, z: i64) -> Self {
        RootVec {
            num: [2 * x, 2 * y, 2 * z],
        }
    }

    /// Doubled coordinates taken verbatim; odd entries mean genuine
    /// halves.
    pub fn halves(t: [i64; 3]) -> Self {
        RootVec { num: t }
    }

    pub fn is_integral(self) -> bool {
        self.num.iter().all(|x| x % 2 == 0)
    }
}

impl fmt::Display for RootVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, &t) in self.num.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if t % 2 == 0 {
                write!(f, "{}", t / 2)?;
            } else {
                write!(f, "{t}/2")?;
            }
        }
        write!(f, ")")
    }
}

impl Serialize for RootVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(3))?;
        for &t in &self.num {
            if t % 2 == 0 {
                seq.serialize_element(&(t / 2))?;
            } else {
                seq.serialize_element(&format!("{t}/2"))?;
            }
        }
        seq.end()
    }
}

/// Product of two doubled-coordinate vectors: four times the true
/// pairing, so sign tests need no division.
fn pair4(g: &[[i64; 3]; 3], a: RootVec, b: RootVec) -> i128 {
    let mut s = 0i128;
    for i in 0..3 {
        for j in 0..3 {
            s += i128::from(a.num[i]) * i128::from(g[i][j]) * i128::from(b.num[j]);
        }
    }
    s
}

/// Exact lattice pairing; integral because both arguments lie in the
/// lattice.
pub fn pairing(g: &[[i64; 3]; 3], a: RootVec, b: RootVec) -> i64 {
    let p = pair4(g, a, b);
    assert_eq!(p % 4, 0, "pairing of non-lattice vectors");
    i64::try_from(p / 4).expect("pairing exceeds i64")
}

pub fn norm(g: &[[i64; 3]; 3], a: RootVec) -> i64 {
    pairing(g, a, a)
}

/// Four times the pairing, exact for any doubled-coordinate vectors;
/// useful for sign and divisibility tests outside the lattice proper.
pub fn pairing_scaled(g: &[[i64; 3]; 3], a: RootVec, b: RootVec) -> i128 {
    pair4(g, a, b)
}

/// Mirrors of adjacent walls meet or are parallel:
/// `(a,b)^2 <= a^2 b^2`.
pub fn adjacent(g: &[[i64; 3]; 3], a: RootVec, b: RootVec) -> bool {
    let ab = pair4(g, a, b);
    ab * ab <= pair4(g, a, a) * pair4(g, b, b)
}

/// Height-zero seeds (plus, for `UPlus`, the pre-accepted first
/// height-one root) in the canonical order.
pub fn seed_roots(form: LatticeForm) -> Vec<RootVec> {
    match form {
        LatticeForm::UPlus { k } => vec![
            RootVec::integral(0, 0, 1),
            RootVec::integral(k, 0, -1),
            RootVec::integral(-1, 1, 0),
        ],
        LatticeForm::Diag { n2, n3, eps, .. } => {
            let mut v1 = RootVec::integral(0, 1, 0);
            let mut v2 = RootVec::integral(0, 0, 1);
            if n2 == n3 {
                v2 = match eps {
                    (0, 0, 0) | (1, 1, 1) => RootVec::integral(0, -1, 1),
                    (0, 1, 1) => RootVec::halves([0, -1, 1]),
                    _ => RootVec::integral(0, 0, 1),
                };
            } else if n2 == 3 * n3 {
                if eps == (0, 1, 1) {
                    v2 = RootVec::halves([0, -1, 1]);
                }
            } else if n3 == 3 * n2 && eps == (0, 1, 1) {
                v1 = RootVec::integral(0, 0, 1);
                v2 = RootVec::halves([0, 1, -1]);
            }
            vec![v1, v2]
        }
    }
}

fn accept_root(g: &[[i64; 3]; 3], roots: &mut Vec<RootVec>, cand: RootVec) {
    // New walls must not separate previously accepted ones.
    if roots.iter().all(|&r| pair4(g, r, cand) >= 0) {
        roots.push(cand);
    }
}

/// All roots of height at most `height_bound`, in acceptance order:
/// heights ascending, candidates within a height in the canonical
/// divisor-driven order, each kept iff it pairs non-negatively with
/// every accepted predecessor.
pub fn enumerate_roots(form: LatticeForm, height_bound: u64) -> Vec<RootVec> {
    form.validate().expect("invalid lattice form");
    assert!(height_bound >= 1, "height bound must be positive");
    let g = form.gram();
    let mut roots = seed_roots(form);
    match form {
        LatticeForm::UPlus { k } => {
            for h1 in 2..=height_bound as i64 {
                for y2 in divisors(h1 as u64) {
                    let y2 = y2 as i64;
                    if (y2 * y2) % h1 != 0 || (k * h1) % (y2 * y2) != 0 {
                        continue;
                    }
                    // d is the square of the candidate root.
                    let d = -2 * y2 * y2 / h1;
                    let lo = ((2 * y2 * y2 - d) / (2 * k)).isqrt();
                    for z in lo..=y2 {
                        let num = 2 * k * z * z + d;
                        if num % (2 * y2) != 0 {
                            continue;
                        }
                        let y1 = num / (2 * y2);
                        // Crystallographic condition on the first
                        // generator; the others hold by construction.
                        if (2 * y1) % d != 0 {
                            continue;
                        }
                        if content(&[y1, y2, z]) != 1 {
                            continue;
                        }
                        accept_root(&g, &mut roots, RootVec::integral(y1, y2, -z));
                    }
                }
            }
        }
        LatticeForm::Diag { n1, n2, n3, eps } => {
            let e = [i64::from(eps.0), i64::from(eps.1), i64::from(eps.2)];
            let lcm3 = lcm(lcm(n1, n2), n3);
            for h1 in 1..=height_bound as i64 {
                for y1t in divisors(h1 as u64) {
                    // y1t is the doubled first coordinate.
                    let y1t = y1t as i64;
                    let num = n1 * y1t * y1t;
                    if num % h1 != 0 {
                        continue;
                    }
                    let d = num / h1;
                    if gcd(2 * lcm3, n1 * y1t) % d != 0 {
                        continue;
                    }
                    let w = num + 4 * d;
                    // Only z with d | n2*z can pass; step accordingly.
                    let step = d / gcd(d, n2);
                    let mut z = 0i64;
                    while n2 * z * z <= w {
                        let rem = w - n2 * z * z;
                        if rem % n3 == 0 {
                            if let Some(y3m) = sqrt_exact(i128::from(rem / n3)) {
                                let t = [y1t, -z, -(y3m as i64)];
                                if (n3 * t[2]) % d == 0 && diag_candidate_ok(d, &e, n1, n2, n3, t) {
                                    accept_root(&g, &mut roots, RootVec::halves(t));
                                }
                            }
                        }
                        z += step;
                    }
                }
            }
        }
    }
    roots
}

/// Glue pairing, membership, and primitivity tests for a doubled
/// Diag candidate that already passed the square conditions.
fn diag_candidate_ok(d: i64, e: &[i64; 3], n1: i64, n2: i64, n3: i64, t: [i64; 3]) -> bool {
    // Crystallographic condition against the glue class: the doubled
    // pairing with the glue vector is divisible by 2d.
    let s = n1 * t[0] * e[0] - n2 * t[1] * e[1] - n3 * t[2] * e[2];
    if s % (2 * d) != 0 {
        return false;
    }
    if t.iter().all(|x| x % 2 == 0) {
        let u = [t[0] / 2, t[1] / 2, t[2] / 2];
        if content(&u) != 1 {
            return false;
        }
        // An integral vector congruent to the glue pattern is twice a
        // glue-class vector, hence imprimitive in the glued lattice.
        if *e != [0, 0, 0] && (0..3).all(|i| u[i].rem_euclid(2) == e[i]) {
            return false;
        }
        true
    } else {
        // Genuine halves exist only in the glue class.
        if *e == [0, 0, 0] || (0..3).any(|i| t[i].rem_euclid(2) != e[i]) {
            return false;
        }
        content(&t) == 1
    }
}

/// Ordered chain of roots with its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub roots: Vec<RootVec>,
    pub gram: Vec<Vec<i64>>,
}

/// Chains extracted from a root list: the principal chain `e`, the
/// counter-chain `f` when `e` does not absorb everything, and any
/// roots neither chain reached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainSet {
    pub e: Chain,
    pub f: Option<Chain>,
    pub orphans: Vec<RootVec>,
}

fn gram_of(g: &[[i64; 3]; 3], chain: &[RootVec]) -> Vec<Vec<i64>> {
    chain
        .iter()
        .map(|&a| chain.iter().map(|&b| pairing(g, a, b)).collect())
        .collect()
}

/// Greedy directed growth: extend past the current end with the last
/// adjacent root in list order, never stepping back onto the end or
/// its predecessor.
fn grow_chain(g: &[[i64; 3]; 3], seed: [RootVec; 2], roots: &[RootVec]) -> Vec<RootVec> {
    let mut chain = seed.to_vec();
    while chain.len() < roots.len() {
        let end = chain[chain.len() - 1];
        let prev = chain[chain.len() - 2];
        let mut next = None;
        for &r in roots {
            if r == end || r == prev || !adjacent(g, r, end) {
                continue;
            }
            next = Some(r);
        }
        match next {
            Some(r) => chain.push(r),
            None => break,
        }
    }
    chain
}

/// Append every pool root adjacent to the live end, in repeated
/// ascending scans, consuming the pool.
fn sweep_growth(
    g: &[[i64; 3]; 3],
    chain: &mut Vec<RootVec>,
    pool: &mut [Option<RootVec>],
    passes: usize,
) {
    for _ in 0..passes {
        for slot in pool.iter_mut() {
            let Some(r) = *slot else { continue };
            if adjacent(g, r, *chain.last().expect("nonempty chain")) {
                chain.push(r);
                *slot = None;
            }
        }
    }
}

/// Reproduce the two-directional chain extraction: grow from the
/// first two roots both ways, splice, then assemble the counter-chain
/// from the leftovers.
pub fn build_chains(g: &[[i64; 3]; 3], roots: &[RootVec]) -> ChainSet {
    assert!(roots.len() >= 2, "chain extraction needs at least two roots");
    let s = roots.len();
    let e1 = grow_chain(g, [roots[1], roots[0]], roots);
    let e2 = grow_chain(g, [roots[0], roots[1]], roots);
    let e: Vec<RootVec> = if e1.len() == s && e2.len() == s {
        e1
    } else {
        e2.iter()
            .rev()
            .copied()
            .chain(e1[2..].iter().copied())
            .collect()
    };
    let chain_e = Chain {
        gram: gram_of(g, &e),
        roots: e.clone(),
    };

    let mut pool: Vec<Option<RootVec>> = roots
        .iter()
        .map(|&r| (!e.contains(&r)).then_some(r))
        .collect();
    let Some(first_slot) = pool.iter().position(|slot| slot.is_some()) else {
        return ChainSet {
            e: chain_e,
            f: None,
            orphans: vec![],
        };
    };
    let first = pool[first_slot].take().expect("occupied slot");
    let mut f1 = vec![first];
    sweep_growth(g, &mut f1, &mut pool, s);
    let mut f2 = vec![f1[0]];
    sweep_growth(g, &mut f2, &mut pool, s);
    let f: Vec<RootVec> = f2
        .iter()
        .rev()
        .copied()
        .chain(f1[1..].iter().copied())
        .collect();
    let orphans: Vec<RootVec> = pool.iter().flatten().copied().collect();
    ChainSet {
        e: chain_e,
        f: Some(Chain {
            gram: gram_of(g, &f),
            roots: f,
        }),
        orphans,
    }
}

fn bri(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

type Mat = [[BigRational; 3]; 3];

fn mat_identity() -> Mat {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { bri(1) } else { bri(0) }))
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).map(|k| &a[i][k] * &b[k][j]).sum())
    })
}

fn mat_transpose(a: &Mat) -> Mat {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

fn mat_apply(a: &Mat, v: &[BigRational; 3]) -> [BigRational; 3] {
    std::array::from_fn(|i| (0..3).map(|k| &a[i][k] * &v[k]).sum())
}

fn mat_from_gram(g: &[[i64; 3]; 3]) -> Mat {
    std::array::from_fn(|i| std::array::from_fn(|j| bri(g[i][j])))
}

/// Rational 3x3 matrix acting on semantic (non-doubled) coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isometry {
    pub mat: Mat,
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry {
            mat: mat_identity(),
        }
    }

    pub fn from_integer_rows(rows: [[i64; 3]; 3]) -> Self {
        Isometry {
            mat: std::array::from_fn(|i| std::array::from_fn(|j| bri(rows[i][j]))),
        }
    }

    pub fn from_rational_rows(rows: [[(i64, i64); 3]; 3]) -> Self {
        Isometry {
            mat: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    let (n, d) = rows[i][j];
                    BigRational::new(BigInt::from(n), BigInt::from(d))
                })
            }),
        }
    }

    pub fn mul(&self, rhs: &Isometry) -> Isometry {
        Isometry {
            mat: mat_mul(&self.mat, &rhs.mat),
        }
    }

    pub fn pow(&self, n: u32) -> Isometry {
        let mut out = Isometry::identity();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.mat == mat_identity()
    }

    /// Image of a doubled-coordinate vector, if it stays
    /// half-integral.
    pub fn apply_doubled(&self, v: RootVec) -> Option<RootVec> {
        let img = mat_apply(&self.mat, &v.num.map(bri));
        let mut t = [0i64; 3];
        for i in 0..3 {
            if !img[i].is_integer() {
                return None;
            }
            t[i] = img[i].to_integer().to_i64()?;
        }
        Some(RootVec { num: t })
    }

    /// Image of an integral vector, if it stays integral.
    pub fn apply_integral(&self, v: [i64; 3]) -> Option<[i64; 3]> {
        let img = self.apply_doubled(RootVec {
            num: v.map(|x| 2 * x),
        })?;
        if !img.is_integral() {
            return None;
        }
        Some(img.num.map(|x| x / 2))
    }
}

impl Serialize for Isometry {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(3))?;
        for row in &self.mat {
            let cells: Vec<serde_json::Value> = row
                .iter()
                .map(|x| {
                    if x.is_integer() {
                        match x.to_integer().to_i64() {
                            Some(n) => serde_json::Value::from(n),
                            None => serde_json::Value::from(x.to_integer().to_string()),
                        }
                    } else {
                        serde_json::Value::from(x.to_string())
                    }
                })
                .collect();
            seq.serialize_element(&cells)?;
        }
        seq.end()
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.mat.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[{}, {}, {}]", row[0], row[1], row[2])?;
        }
        Ok(())
    }
}

/// Primitive generator of the plane orthogonal to a pair, in doubled
/// coordinates, primitive in the glued lattice and oriented toward
/// the future cone.
fn orthogonal_complement(
    g: &[[i64; 3]; 3],
    form: LatticeForm,
    pair: (RootVec, RootVec),
) -> Option<RootVec> {
    let image = |r: RootVec| -> [i128; 3] {
        std::array::from_fn(|i| {
            (0..3)
                .map(|j| i128::from(g[i][j]) * i128::from(r.num[j]))
                .sum()
        })
    };
    let ga = image(pair.0);
    let gb = image(pair.1);
    let cr = [
        ga[1] * gb[2] - ga[2] * gb[1],
        ga[2] * gb[0] - ga[0] * gb[2],
        ga[0] * gb[1] - ga[1] * gb[0],
    ];
    let ct = content_i128(&cr);
    if ct == 0 {
        return None;
    }
    let w: [i64; 3] =
        std::array::from_fn(|i| i64::try_from(cr[i] / ct).expect("complement exceeds i64"));
    // Halve into the glue class when the integral primitive vector
    // already matches the glue parity.
    let e = form.eps_vec();
    let in_glue_class = e != [0, 0, 0] && (0..3).all(|i| w[i].rem_euclid(2) == e[i]);
    let mut t = if in_glue_class { w } else { w.map(|x| 2 * x) };
    let anchor = form.cone_anchor();
    let toward = pair4(
        g,
        RootVec { num: t },
        RootVec {
            num: anchor.map(|x| 2 * x),
        },
    );
    let flip = match toward.cmp(&0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => t.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0),
    };
    if flip {
        t = t.map(|x| -x);
    }
    Some(RootVec { num: t })
}

/// Unique linear map taking the first basis (doubled coordinates) to
/// the second; `None` when the source triple is dependent.
fn solve_basis_map(src: [RootVec; 3], dst: [RootVec; 3]) -> Option<Mat> {
    let col = |v: &[RootVec; 3], i: usize, j: usize| BigInt::from(v[j].num[i]);
    let s: [[BigInt; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| col(&src, i, j)));
    let det = |m: &[[BigInt; 3]; 3]| -> BigInt {
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    };
    let ds = det(&s);
    if ds.is_zero() {
        return None;
    }
    // adj(s)[i][j] = cofactor(j, i); s^{-1} = adj(s) / det(s).
    let adj: [[BigInt; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (r0, r1) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c0, c1) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let minor = &s[r0][c0] * &s[r1][c1] - &s[r0][c1] * &s[r1][c0];
            if (i + j) % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
    });
    let d: [[BigInt; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| col(&dst, i, j)));
    Some(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let numer: BigInt = (0..3).map(|k| &d[i][k] * &adj[k][j]).sum();
            BigRational::new(numer, ds.clone())
        })
    }))
}

fn rational_doubled_in_lattice(form: LatticeForm, v: &[BigRational; 3]) -> bool {
    let mut t = [0i64; 3];
    for i in 0..3 {
        if !v[i].is_integer() {
            return false;
        }
        let Some(x) = v[i].to_integer().to_i64() else {
            return false;
        };
        t[i] = x;
    }
    form.contains_doubled(t)
}

fn preserves_form(g: &[[i64; 3]; 3], iso: &Isometry) -> bool {
    let gq = mat_from_gram(g);
    mat_mul(&mat_mul(&mat_transpose(&iso.mat), &gq), &iso.mat) == gq
}

fn preserves_lattice(form: LatticeForm, iso: &Isometry) -> bool {
    for j in 0..3 {
        // Image of the j-th generator, doubled.
        let col: [BigRational; 3] = std::array::from_fn(|i| &iso.mat[i][j] * bri(2));
        if !rational_doubled_in_lattice(form, &col) {
            return false;
        }
    }
    let e = form.eps_vec();
    if e != [0, 0, 0] {
        // Image of the glue vector, doubled.
        let img = mat_apply(&iso.mat, &e.map(bri));
        if !rational_doubled_in_lattice(form, &img) {
            return false;
        }
    }
    true
}

fn preserves_cone(g: &[[i64; 3]; 3], form: LatticeForm, iso: &Isometry) -> bool {
    let p = form.cone_anchor();
    let img = mat_apply(&iso.mat, &p.map(bri));
    let mut s = BigRational::zero();
    for i in 0..3 {
        for j in 0..3 {
            s += &img[i] * bri(g[i][j]) * bri(p[j]);
        }
    }
    s.is_positive()
}

/// Lattice automorphism in the future-cone-preserving group sending
/// the ordered pair `src` to `dst`; `None` when no such map exists.
///
/// Each pair is extended to a rational basis by the primitive
/// orthogonal-complement generator, both complement signs are tried
/// on the destination side, and the solved map is accepted only if it
/// preserves the form exactly, the lattice (glue class included), and
/// the future cone.
pub fn find_pair_automorphism(
    g: &[[i64; 3]; 3],
    form: LatticeForm,
    src: (RootVec, RootVec),
    dst: (RootVec, RootVec),
) -> Option<Isometry> {
    let sig = |p: (RootVec, RootVec)| [pair4(g, p.0, p.0), pair4(g, p.0, p.1), pair4(g, p.1, p.1)];
    if sig(src) != sig(dst) {
        return None;
    }
    let ws = orthogonal_complement(g, form, src)?;
    let wd = orthogonal_complement(g, form, dst)?;
    for flip in [1i64, -1] {
        let wd_signed = RootVec {
            num: wd.num.map(|x| flip * x),
        };
        let Some(mat) = solve_basis_map([src.0, src.1, ws], [dst.0, dst.1, wd_signed]) else {
            continue;
        };
        let iso = Isometry { mat };
        if preserves_form(g, &iso) && preserves_lattice(form, &iso) && preserves_cone(g, form, &iso)
        {
            return Some(iso);
        }
    }
    None
}

/// Basis of the rational kernel in reduced echelon coordinates.
fn rational_kernel(a: &Mat) -> Vec<[BigRational; 3]> {
    let mut rows: Vec<[BigRational; 3]> = a.to_vec();
    let mut pivots: Vec<usize> = vec![];
    let mut r = 0;
    for c in 0..3 {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x /= inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for j in 0..3 {
                    let delta = &factor * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut basis = vec![];
    for c in 0..3 {
        if pivots.contains(&c) {
            continue;
        }
        let mut v: [BigRational; 3] = std::array::from_fn(|_| BigRational::zero());
        v[c] = BigRational::one();
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[ri][c].clone();
        }
        basis.push(v);
    }
    basis
}

/// Clear denominators, divide out the content, and point the first
/// nonzero coordinate up.
fn primitivize(v: &[BigRational; 3]) -> [i64; 3] {
    let mut scale = BigInt::one();
    for x in v {
        let den = x.denom();
        let g = num_bigint::BigInt::from(gcd(
            scale.to_i64().expect("denominator overflow"),
            den.to_i64().expect("denominator overflow"),
        ));
        scale = scale * den / g;
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(scale.clone())).to_integer())
        .collect();
    let mut out = [0i64; 3];
    for i in 0..3 {
        out[i] = ints[i].to_i64().expect("eigenvector exceeds i64");
    }
    let c = content(&out);
    if c > 1 {
        out = out.map(|x| x / c);
    }
    if out.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        out = out.map(|x| -x);
    }
    out
}

/// Primitive integral eigenvectors at the eigenvalues `+1` and `-1`,
/// sign-normalised, with their lattice squares.
pub fn integral_eigenvectors(g: &[[i64; 3]; 3], c: &Isometry) -> Vec<(i8, [i64; 3], i64)> {
    let mut out = vec![];
    for lam in [1i8, -1] {
        let a: Mat = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut x = c.mat[i][j].clone();
                if i == j {
                    x -= bri(i64::from(lam));
                }
                x
            })
        });
        for v in rational_kernel(&a) {
            let p = primitivize(&v);
            let pr = RootVec {
                num: p.map(|x| 2 * x),
            };
            out.push((lam, p, norm(g, pr)));
        }
    }
    out
}

/// Outcome of the reflectivity decision at a given search height.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReflectivityVerdict {
    /// The principal chain closed on itself: the fundamental polygon
    /// is bounded by finitely many walls.
    Elliptic {
        p_m: Vec<RootVec>,
        gram: Vec<Vec<i64>>,
    },
    /// An infinite-order symmetry glides the chain along itself; its
    /// fixed axis separates the two chains.
    Hyperbolic { weyl: [i64; 3], period: Isometry },
    /// Symmetries incompatible with finite covolume.
    NotReflective { witness: Vec<Isometry> },
    /// The height bound was exhausted without a decision.
    Inconclusive { height_reached: u64 },
}

/// Root list, chains, and verdict from one classification run.
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub roots: Vec<RootVec>,
    pub chains: ChainSet,
    pub verdict: ReflectivityVerdict,
}

/// Orthogonal root pairs oriented more-negative-square first, kept
/// only when the half-sum of the complement generator and the
/// later-accepted root stays in the lattice.  When the two seeds are
/// themselves orthogonal, only pairs Gram-matching the seed pair are
/// considered.
fn orthogonal_pairs(
    g: &[[i64; 3]; 3],
    form: LatticeForm,
    roots: &[RootVec],
) -> Vec<(RootVec, RootVec)> {
    let e = form.eps_vec();
    let anchor_sig = (roots.len() >= 2 && pair4(g, roots[0], roots[1]) == 0)
        .then(|| (norm(g, roots[0]), norm(g, roots[1])));
    let mut kept = vec![];
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if pair4(g, roots[i], roots[j]) != 0 {
                continue;
            }
            let (a, b) = if norm(g, roots[i]) <= norm(g, roots[j]) {
                (roots[i], roots[j])
            } else {
                (roots[j], roots[i])
            };
            if anchor_sig.is_some_and(|sig| sig != (norm(g, a), norm(g, b))) {
                continue;
            }
            let Some(w) = orthogonal_complement(g, form, (a, b)) else {
                continue;
            };
            // Half-sum with the later root, in quarter coordinates;
            // either sign of w gives the same answer.
            let q: [i64; 3] = std::array::from_fn(|k| w.num[k] + roots[j].num[k]);
            let integral = q.iter().all(|x| x.rem_euclid(4) == 0);
            let glued = e != [0, 0, 0] && (0..3).all(|k| (q[k] - 2 * e[k]).rem_euclid(4) == 0);
            if integral || glued {
                kept.push((a, b));
            }
        }
    }
    kept
}

/// Candidate chain-shift symmetries: first from repeated consecutive
/// Gram signatures along chain `e`, then (only if that fails) from
/// Gram-matched orthogonal pairs.
fn period_candidates(
    g: &[[i64; 3]; 3],
    form: LatticeForm,
    roots: &[RootVec],
    chains: &ChainSet,
) -> Vec<Isometry> {
    let mut out = vec![];
    let e = &chains.e.roots;
    if e.len() >= 2 {
        let base = (e[0], e[1]);
        for q in 1..e.len().saturating_sub(1) {
            if let Some(c) = find_pair_automorphism(g, form, base, (e[q], e[q + 1])) {
                out.push(c);
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    let kept = orthogonal_pairs(g, form, roots);
    for i in 0..kept.len() {
        let sig = |p: &(RootVec, RootVec)| (norm(g, p.0), norm(g, p.1));
        if kept[..i].iter().any(|p| sig(p) == sig(&kept[i])) {
            continue; // not the first pair of its signature
        }
        for later in kept[i + 1..].iter() {
            if sig(later) != sig(&kept[i]) {
                continue;
            }
            if let Some(c) = find_pair_automorphism(g, form, kept[i], *later) {
                out.push(c);
            }
        }
    }
    out
}

/// Axis test for the hyperbolic branch: every integral eigenvector of
/// the period squares negatively, the period shifts the counter-chain
/// the same way, and one eigenvector separates the chains by sign.
fn hyperbolic_axis(
    g: &[[i64; 3]; 3],
    c: &Isometry,
    e: &[RootVec],
    f: &[RootVec],
) -> Option<[i64; 3]> {
    let eig = integral_eigenvectors(g, c);
    if eig.is_empty() || eig.iter().any(|(_, _, n)| *n >= 0) {
        return None;
    }
    let i0 = c.apply_doubled(f[0])?;
    let i1 = c.apply_doubled(f[1])?;
    let q = f.iter().position(|&r| r == i0)?;
    if q + 1 >= f.len() || f[q + 1] != i1 {
        return None;
    }
    for (_, v, _) in &eig {
        for s in [1i64, -1] {
            let w = RootVec {
                num: v.map(|x| 2 * s * x),
            };
            if e.iter().all(|&r| pair4(g, r, w) > 0) && f.iter().all(|&r| pair4(g, r, w) < 0) {
                return Some(v.map(|x| s * x));
            }
        }
    }
    None
}

/// Run the enumeration and decide reflectivity; `hnr` is the narrow
/// class number of the lattice when the caller knows it (required
/// only by the infinite-order branch).
pub fn run_classification(
    form: LatticeForm,
    height_bound: u64,
    hnr: Option<u64>,
) -> Classification {
    let g = form.gram();
    let roots = enumerate_roots(form, height_bound);
    let chains = build_chains(&g, &roots);
    let verdict = decide(&g, form, height_bound, hnr, &roots, &chains);
    Classification {
        roots,
        chains,
        verdict,
    }
}

pub fn classify_reflectivity(
    form: LatticeForm,
    height_bound: u64,
    hnr: Option<u64>,
) -> ReflectivityVerdict {
    run_classification(form, height_bound, hnr).verdict
}

fn decide(
    g: &[[i64; 3]; 3],
    form: LatticeForm,
    height_bound: u64,
    hnr: Option<u64>,
    roots: &[RootVec],
    chains: &ChainSet,
) -> ReflectivityVerdict {
    let e = &chains.e.roots;
    if chains.f.is_none()
        && chains.orphans.is_empty()
        && e.len() >= 3
        && adjacent(g, e[0], e[e.len() - 1])
    {
        return ReflectivityVerdict::Elliptic {
            p_m: e.clone(),
            gram: chains.e.gram.clone(),
        };
    }
    let periods = period_candidates(g, form, roots, chains);
    if periods.is_empty() {
        return ReflectivityVerdict::Inconclusive {
            height_reached: height_bound,
        };
    }
    // Finite-order candidates (order divides 12 in this rank) are
    // symmetries of the configuration, not periods; skip them.
    let infinite = |c: &&Isometry| !c.pow(12).is_identity();
    if let Some(f) = &chains.f {
        for c in periods.iter().filter(infinite) {
            if let Some(weyl) = hyperbolic_axis(g, c, e, &f.roots) {
                return ReflectivityVerdict::Hyperbolic {
                    weyl,
                    period: c.clone(),
                };
            }
        }
    }
    if hnr == Some(1) {
        if let Some(c) = periods.iter().find(infinite) {
            return ReflectivityVerdict::NotReflective {
                witness: vec![c.clone()],
            };
        }
    }
    for i in 0..periods.len() {
        for j in i + 1..periods.len() {
            let bb = periods[i].pow(2);
            let cc = periods[j].pow(2);
            if bb.mul(&cc) != cc.mul(&bb) {
                return ReflectivityVerdict::NotReflective {
                    witness: vec![periods[i].clone(), periods[j].clone()],
                };
            }
        }
    }
    ReflectivityVerdict::Inconclusive {
        height_reached: height_bound,
    }
}
