//! Enumeration of the squared Gram matrices attached to narrow places of
//! the five admissible point configurations, together with the
//! overlattice filter that keeps only main classes.
//!
//! A configuration of `k` points on the boundary circle is encoded by a
//! symmetric `k x k` matrix `alpha` with diagonal 4 whose off-diagonal
//! entries are the squared Gram products of the corresponding root pair
//! (0 for points at infinite distance).  Every multiplicative splitting
//! `alpha[i][j] = a[i][j] * a[j][i]` into a generalized Cartan matrix
//! `a` with diagonal -2 determines positive weights `lambda` such that
//! `b = a * diag(lambda) / content` is a primitive symmetric matrix of
//! rank 3 -- the squared Gram matrix of the place.  For the five-point
//! chain the canonical splitting entries are rational (never the
//! product `b`); see [`Exact`].

use std::cmp::max;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::intarith::{
    divisors, factorize, gcd, gcd_i128, greatest_prime, is_squarefree, kronecker, odd_radical,
    sqrt_exact,
};
use crate::lattice3::hnr_doubled;

type Rat = Ratio<i128>;

const RZERO: Rat = Ratio::new_raw(0, 1);

fn rint(v: i64) -> Rat {
    Ratio::new_raw(v as i128, 1)
}

fn rint128(v: i128) -> Rat {
    Ratio::new_raw(v, 1)
}

/// Shortening of two joined edges of squared lengths `u`, `v` meeting at
/// angle `alpha`: the smaller root of `(u-x)(v-x) = u v (1+cos(alpha))/2`.
pub fn g_root(alpha: f64, u: f64, v: f64) -> f64 {
    let a = (1.0 + alpha.cos()) / 2.0;
    (u + v - (a * (u + v).powi(2) + (1.0 - a) * (u - v).powi(2)).sqrt()) / 2.0
}

/// Squared-length bound for a pencil through two points with edge
/// parameters `a1`, `a2`, `a3` and pencil coordinate `t in [0, 1]`.
/// At `t = 0` it degenerates to `(sqrt(a1)+sqrt(a2)+sqrt(a3))^2`.
pub fn f_p2(a1: f64, a2: f64, a3: f64, t: f64) -> f64 {
    let s = (a1 + (1.0 - a1) * t * t).sqrt()
        + (a2 + (1.0 - a2) * t * t).sqrt()
        + (a3 + a3 * t + t * t / 4.0).sqrt();
    (s * s - t * t / 4.0) / (1.0 + t)
}

/// Squared-length bound for a pencil through three points with edge
/// parameters `a1..a4` and pencil coordinates `s, t in [0, 1]`.
/// At `s = t = 1` the value is identically 4.
pub fn f_p3(a1: f64, a2: f64, a3: f64, a4: f64, s: f64, t: f64) -> f64 {
    let d = s - t;
    let p = s + t;
    let r = (a1 + (1.0 - a1) * s * s).sqrt()
        + (a2 + (1.0 - a2) * s * s).sqrt()
        + (a3 + a3 * d + a3 * d * d / 4.0 + (1.0 - a3) * p * p / 4.0).sqrt()
        + (a4 + (1.0 - a4) * t * t).sqrt();
    (r * r - d * d / 4.0) / ((1.0 + s) * (1.0 + t))
}

/// The five point configurations carrying narrow places: three or four
/// points with one distance pattern or two, and the five-point chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NarrowType {
    I1,
    I0,
    II1,
    II0,
    III,
}

impl NarrowType {
    pub const ALL: [NarrowType; 5] = [
        NarrowType::I1,
        NarrowType::I0,
        NarrowType::II1,
        NarrowType::II0,
        NarrowType::III,
    ];

    /// Number of points in the configuration (size of the matrices).
    pub fn points(self) -> usize {
        match self {
            NarrowType::I1 | NarrowType::I0 => 3,
            NarrowType::II1 | NarrowType::II0 => 4,
            NarrowType::III => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NarrowType::I1 => "I1",
            NarrowType::I0 => "I0",
            NarrowType::II1 => "II1",
            NarrowType::II0 => "II0",
            NarrowType::III => "III",
        }
    }
}

impl fmt::Display for NarrowType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NarrowType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "I1" => Ok(NarrowType::I1),
            "I0" => Ok(NarrowType::I0),
            "II1" => Ok(NarrowType::II1),
            "II0" => Ok(NarrowType::II0),
            "III" => Ok(NarrowType::III),
            _ => Err(format!("unknown narrow-place type `{s}`")),
        }
    }
}

/// Exact rational entry of a Cartan splitting or weight vector.  The
/// 3- and 4-point splittings are entirely integral; in the five-point
/// chain the canonical splitting is rational in roughly three quarters
/// of all records (their product `b` is still integral).  Serialized as
/// a plain integer when integral and as a `"p/q"` string otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exact(pub Ratio<i64>);

impl Exact {
    pub fn int(v: i64) -> Self {
        Exact(Ratio::new_raw(v, 1))
    }

    pub fn new(numer: i64, denom: i64) -> Self {
        Exact(Ratio::new(numer, denom))
    }

    pub fn is_integer(self) -> bool {
        self.0.is_integer()
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            s.serialize_i64(self.0.to_integer())
        } else {
            s.collect_str(self)
        }
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Exact;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a `p/q` string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exact, E> {
                Ok(Exact::int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exact, E> {
                i64::try_from(v)
                    .map(Exact::int)
                    .map_err(|_| E::custom("entry exceeds i64"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exact, E> {
                let (n, d) = v
                    .split_once('/')
                    .ok_or_else(|| E::custom("expected `p/q`"))?;
                let n: i64 = n.trim().parse().map_err(E::custom)?;
                let d: i64 = d.trim().parse().map_err(E::custom)?;
                if d <= 0 {
                    return Err(E::custom("denominator must be positive"));
                }
                Ok(Exact::new(n, d))
            }
        }
        d.deserialize_any(V)
    }
}

/// One narrow place: the squared Gram data of a point configuration
/// together with the invariants of its rank-3 form `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NarrowPlaceRecord {
    #[serde(rename = "type")]
    pub type_tag: NarrowType,
    /// Symmetric squared Gram products, diagonal 4.
    pub alpha: Vec<Vec<i64>>,
    /// Generalized Cartan splitting, diagonal -2.
    pub cartan: Vec<Vec<Exact>>,
    /// Positive column weights symmetrizing the splitting.
    pub lambda: Vec<Exact>,
    /// Primitive symmetric rank-3 matrix `cartan * diag(lambda) / content`.
    pub b: Vec<Vec<i64>>,
    /// Exponent of the discriminant group of `b`.
    pub a: u64,
    /// Odd radical of `a`.
    pub a1: u64,
    /// Greatest prime divisor of `a` (0 when `a == 1`).
    pub a2: u64,
}

/// Count and running extrema over one enumeration: number of places,
/// largest discriminant exponent, largest odd radical, largest prime.
/// The extrema start at 1, matching an empty maximum over `a >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumStats {
    pub n: u64,
    pub a: u64,
    pub a1: u64,
    pub a2: u64,
}

impl EnumStats {
    fn new() -> Self {
        EnumStats {
            n: 0,
            a: 1,
            a1: 1,
            a2: 1,
        }
    }

    fn absorb(&mut self, a: u64) {
        self.n += 1;
        self.a = max(self.a, a);
        self.a1 = max(self.a1, odd_radical(a));
        self.a2 = max(self.a2, greatest_prime(a));
    }

    fn merge(mut self, o: EnumStats) -> Self {
        self.n += o.n;
        self.a = max(self.a, o.a);
        self.a1 = max(self.a1, o.a1);
        self.a2 = max(self.a2, o.a2);
        self
    }
}

/// A main class surviving the overlattice filter: discriminant kernel
/// `d`, genus tag `eta`, and its non-reflective overlattice count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainTriplet {
    pub d: u64,
    pub eta: u32,
    pub h: u64,
}

/// Invariants (d, eta, hnr) of the main classes that were settled by
/// running the reflection algorithm on each lattice directly instead
/// of through the overlattice filter; the filter must reject every one
/// of them.
pub const DIRECT_CHECK_PAIRS: [(u64, u32, u64); 39] = [
    (57, 1, 1),
    (65, 3, 1),
    (71, 0, 1),
    (119, 3, 1),
    (161, 1, 1),
    (182, 3, 1),
    (194, 0, 1),
    (246, 0, 1),
    (259, 3, 1),
    (266, 0, 1),
    (266, 3, 1),
    (285, 1, 1),
    (299, 3, 1),
    (326, 0, 1),
    (335, 0, 1),
    (354, 2, 1),
    (386, 0, 1),
    (407, 0, 1),
    (506, 0, 1),
    (530, 0, 1),
    (534, 0, 1),
    (546, 2, 0),
    (602, 3, 1),
    (645, 6, 1),
    (714, 6, 1),
    (777, 6, 1),
    (854, 3, 1),
    (897, 5, 1),
    (897, 7, 1),
    (935, 6, 1),
    (966, 2, 1),
    (1106, 1, 1),
    (1254, 4, 1),
    (1394, 3, 1),
    (1659, 2, 1),
    (2210, 6, 1),
    (3311, 1, 1),
    (3990, 4, 1),
    (4466, 1, 1),
];

// ---------------------------------------------------------------------
// float loop bounds

/// Largest integer not exceeding `x + 1e-6`.  The guard makes bounds
/// that are exactly integral inclusive; an irrational bound within one
/// part in 1e4 of an integer would make the cutoff ambiguous, so the
/// audit rejects it (f64 noise on an exact bound stays below 1e-9*|x|).
fn real_upper(x: f64) -> i64 {
    let near = (x - x.round()).abs();
    debug_assert!(
        near <= 1e-9 * x.abs().max(1.0) || near >= 1e-4,
        "ambiguous enumeration bound {x}"
    );
    (x + 1e-6).floor() as i64
}

/// Whether the integer `value` exceeds the real bound up to a 1e-7 slack,
/// with the same exactness audit as `real_upper`.
fn exceeds(value: i64, bound: f64) -> bool {
    let near = (bound - bound.round()).abs();
    debug_assert!(
        near <= 1e-9 * bound.abs().max(1.0) || near >= 1e-4,
        "ambiguous comparison bound {bound}"
    );
    value as f64 > bound - 1e-7
}

// ---------------------------------------------------------------------
// record assembly

#[derive(Clone, Copy)]
struct LightRecord {
    k: usize,
    alpha: [[i64; 5]; 5],
    cartan: [[Rat; 5]; 5],
    lambda: [Rat; 5],
    b: [[i64; 5]; 5],
}

fn lcm_i128(a: i128, b: i128) -> i128 {
    a / gcd_i128(a, b) * b
}

fn finish(k: usize, alpha: [[i64; 5]; 5], cartan: [[Rat; 5]; 5], lambda: [Rat; 5]) -> LightRecord {
    let mut bp = [[RZERO; 5]; 5];
    for i in 0..k {
        for j in 0..k {
            bp[i][j] = cartan[i][j] * lambda[j];
        }
    }
    for i in 0..k {
        for j in 0..i {
            debug_assert!(bp[i][j] == bp[j][i], "weights fail to symmetrize");
        }
    }
    let mut den = 1i128;
    for row in bp.iter().take(k) {
        for e in row.iter().take(k) {
            den = lcm_i128(den, *e.denom());
        }
    }
    let mut ints = [[0i128; 5]; 5];
    let mut c = 0i128;
    for i in 0..k {
        for j in 0..k {
            ints[i][j] = bp[i][j].numer() * (den / bp[i][j].denom());
            c = gcd_i128(c, ints[i][j]);
        }
    }
    assert!(c > 0);
    let mut b = [[0i64; 5]; 5];
    for i in 0..k {
        for j in 0..k {
            let v = ints[i][j] / c;
            b[i][j] = i64::try_from(v).expect("squared Gram entry exceeds i64");
        }
    }
    LightRecord {
        k,
        alpha,
        cartan,
        lambda,
        b,
    }
}

fn finish_int(
    k: usize,
    alpha: [[i64; 5]; 5],
    cartan: [[i64; 5]; 5],
    lambda: [i64; 5],
) -> LightRecord {
    let mut cr = [[RZERO; 5]; 5];
    let mut lr = [RZERO; 5];
    for i in 0..k {
        for j in 0..k {
            cr[i][j] = rint(cartan[i][j]);
        }
        lr[i] = rint(lambda[i]);
    }
    finish(k, alpha, cr, lr)
}

fn div_i64(n: i64) -> Vec<i64> {
    divisors(n as u64).into_iter().map(|d| d as i64).collect()
}

fn sym_set(m: &mut [[i64; 5]; 5], i: usize, j: usize, v: i64) {
    m[i][j] = v;
    m[j][i] = v;
}

// ---------------------------------------------------------------------
// discriminant-group invariants via minor gcds

fn det3(m: &[[i64; 5]; 5], r: [usize; 3], c: [usize; 3]) -> i128 {
    let a = |i: usize, j: usize| m[r[i]][c[j]] as i128;
    a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
        - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
}

fn gcd_minors3(m: &[[i64; 5]; 5], k: usize) -> i128 {
    let mut g = 0i128;
    for r0 in 0..k {
        for r1 in r0 + 1..k {
            for r2 in r1 + 1..k {
                for c0 in 0..k {
                    for c1 in c0 + 1..k {
                        for c2 in c1 + 1..k {
                            g = gcd_i128(g, det3(m, [r0, r1, r2], [c0, c1, c2]));
                        }
                    }
                }
            }
        }
    }
    g
}

fn gcd_minors2(m: &[[i64; 5]; 5], k: usize) -> i128 {
    let mut g = 0i128;
    for r0 in 0..k {
        for r1 in r0 + 1..k {
            for c0 in 0..k {
                for c1 in c0 + 1..k {
                    let d = m[r0][c0] as i128 * m[r1][c1] as i128
                        - m[r0][c1] as i128 * m[r1][c0] as i128;
                    g = gcd_i128(g, d);
                }
            }
        }
    }
    g
}

/// Exponent of the discriminant group of a rank-3 matrix: the largest
/// elementary divisor, i.e. the ratio of the gcd of all 3x3 minors to
/// the gcd of all 2x2 minors.
fn disc_exponent(b: &[[i64; 5]; 5], k: usize) -> u64 {
    let d3 = gcd_minors3(b, k);
    let d2 = gcd_minors2(b, k);
    assert!(d3 > 0 && d2 > 0 && d3 % d2 == 0);
    u64::try_from(d3 / d2).expect("discriminant exponent exceeds u64")
}

fn to_public(tag: NarrowType, lr: &LightRecord) -> NarrowPlaceRecord {
    let k = lr.k;
    let trunc = |m: &[[i64; 5]; 5]| -> Vec<Vec<i64>> { (0..k).map(|i| m[i][..k].to_vec()).collect() };
    let as_exact = |e: &Rat| -> Exact {
        let n = i64::try_from(*e.numer()).expect("entry exceeds i64");
        let d = i64::try_from(*e.denom()).expect("entry exceeds i64");
        Exact(Ratio::new_raw(n, d))
    };
    let cartan = (0..k)
        .map(|i| (0..k).map(|j| as_exact(&lr.cartan[i][j])).collect())
        .collect();
    let lambda = (0..k).map(|j| as_exact(&lr.lambda[j])).collect();
    let a = disc_exponent(&lr.b, k);
    NarrowPlaceRecord {
        type_tag: tag,
        alpha: trunc(&lr.alpha),
        cartan,
        lambda,
        b: trunc(&lr.b),
        a,
        a1: odd_radical(a),
        a2: greatest_prime(a),
    }
}

// ---------------------------------------------------------------------
// the five generators

/// Three points; `alpha12 == 0` is the stratum with one infinite edge.
fn gen_i(alpha12: i64, alpha23: i64, f: &mut impl FnMut(&LightRecord)) {
    let s12 = (2.0 + (alpha12 as f64).sqrt()).sqrt();
    let s23 = (2.0 + (alpha23 as f64).sqrt()).sqrt();
    let top = real_upper((((s12 + s23).powi(2) - 2.0) as f64).powi(2));
    let d12 = if alpha12 == 0 {
        vec![0]
    } else {
        div_i64(alpha12)
    };
    for alpha13 in alpha23..=top {
        let Some(su) = sqrt_exact((alpha12 * alpha23 * alpha13) as i128) else {
            continue;
        };
        let su = su as i64;
        // positivity of the truncated determinant: signature (1, 2)
        if -8 + 2 * su + 2 * (alpha12 + alpha13 + alpha23) <= 0 {
            continue;
        }
        let mut alpha = [[0i64; 5]; 5];
        for (i, row) in alpha.iter_mut().enumerate().take(3) {
            row[i] = 4;
        }
        sym_set(&mut alpha, 0, 1, alpha12);
        sym_set(&mut alpha, 0, 2, alpha13);
        sym_set(&mut alpha, 1, 2, alpha23);
        for &a12 in &d12 {
            let a21 = if alpha12 == 0 { 0 } else { alpha12 / a12 };
            for a23 in div_i64(alpha23) {
                let a32 = alpha23 / a23;
                for a13 in div_i64(alpha13) {
                    let a31 = alpha13 / a13;
                    if a12 * a23 * a31 != a21 * a13 * a32 {
                        continue;
                    }
                    let mut cart = [[0i64; 5]; 5];
                    for (i, row) in cart.iter_mut().enumerate().take(3) {
                        row[i] = -2;
                    }
                    cart[0][1] = a12;
                    cart[1][0] = a21;
                    cart[0][2] = a13;
                    cart[2][0] = a31;
                    cart[1][2] = a23;
                    cart[2][1] = a32;
                    let lambda = [a13 * a32, a23 * a31, a31 * a32, 0, 0];
                    f(&finish_int(3, alpha, cart, lambda));
                }
            }
        }
    }
}

/// Four points, one finite edge among the outer pair.
fn gen_ii1(alpha34: i64, f: &mut impl FnMut(&LightRecord)) {
    let s34 = (alpha34 as f64).sqrt();
    let pencil = (std::f64::consts::SQRT_2 + (s34 / 4.0 + 0.5).sqrt()).powi(2);
    let tangent = ((2.0 + (s34 / 2.0 + 1.25).sqrt()).powi(2) - 0.25) / 2.0;
    let top14 = real_upper((4.0 * pencil.max(tangent) - 2.0).powi(2));
    let low24 = ((std::f64::consts::SQRT_2 + (2.0 + s34).sqrt()).powi(2) - 2.0).powi(2);
    for alpha14 in 0..=top14 {
        for alpha13 in 5..=36i64 {
            let Some(su) = sqrt_exact((alpha13 * alpha34 * alpha14) as i128) else {
                continue;
            };
            let su = su as i64;
            let num = 4 * (alpha14 + alpha34 + su);
            if num % (alpha13 - 4) != 0 {
                continue;
            }
            let alpha24 = 4 + num / (alpha13 - 4);
            if !exceeds(alpha24, low24) {
                continue;
            }
            let mut alpha = [[0i64; 5]; 5];
            for (i, row) in alpha.iter_mut().enumerate().take(4) {
                row[i] = 4;
            }
            sym_set(&mut alpha, 0, 2, alpha13);
            sym_set(&mut alpha, 2, 3, alpha34);
            sym_set(&mut alpha, 1, 3, alpha24);
            sym_set(&mut alpha, 0, 3, alpha14);
            let d24 = div_i64(alpha24);
            for a34 in div_i64(alpha34) {
                let a43 = alpha34 / a34;
                for a13 in div_i64(alpha13) {
                    let a31 = alpha13 / a13;
                    if su % (a13 * a34) != 0 {
                        continue;
                    }
                    let a41 = su / (a13 * a34);
                    let a14 = if a41 == 0 {
                        0
                    } else if alpha14 % a41 == 0 {
                        alpha14 / a41
                    } else {
                        continue;
                    };
                    for &a24 in &d24 {
                        let a42 = alpha24 / a24;
                        let mut cart = [[0i64; 5]; 5];
                        for (i, row) in cart.iter_mut().enumerate().take(4) {
                            row[i] = -2;
                        }
                        cart[0][2] = a13;
                        cart[2][0] = a31;
                        cart[2][3] = a34;
                        cart[3][2] = a43;
                        cart[1][3] = a24;
                        cart[3][1] = a42;
                        cart[0][3] = a14;
                        cart[3][0] = a41;
                        let lambda = [a13 * a34 * a42, a31 * a43 * a24, a31 * a34 * a42, a31 * a43 * a42, 0];
                        f(&finish_int(4, alpha, cart, lambda));
                    }
                }
            }
        }
    }
}

/// Four points, two disjoint infinite edges; `4 + aa` and `4 alpha14/aa + 4`
/// parametrize the two finite distances.
fn gen_ii0(alpha14: i64, f: &mut impl FnMut(&LightRecord)) {
    for aa in div_i64(4 * alpha14) {
        if aa * aa > 4 * alpha14 {
            break;
        }
        let alpha13 = 4 + aa;
        let alpha24 = 4 * alpha14 / aa + 4;
        debug_assert!(alpha13 <= 36);
        let mut alpha = [[0i64; 5]; 5];
        for (i, row) in alpha.iter_mut().enumerate().take(4) {
            row[i] = 4;
        }
        sym_set(&mut alpha, 0, 2, alpha13);
        sym_set(&mut alpha, 1, 3, alpha24);
        sym_set(&mut alpha, 0, 3, alpha14);
        let d24 = div_i64(alpha24);
        let d14 = div_i64(alpha14);
        for a13 in div_i64(alpha13) {
            let a31 = alpha13 / a13;
            for &a24 in &d24 {
                let a42 = alpha24 / a24;
                for &a14 in &d14 {
                    let a41 = alpha14 / a14;
                    let mut cart = [[0i64; 5]; 5];
                    for (i, row) in cart.iter_mut().enumerate().take(4) {
                        row[i] = -2;
                    }
                    cart[0][2] = a13;
                    cart[2][0] = a31;
                    cart[0][3] = a14;
                    cart[3][0] = a41;
                    cart[1][3] = a24;
                    cart[3][1] = a42;
                    let lambda = [a13 * a14 * a42, a13 * a41 * a24, a31 * a14 * a42, a13 * a42 * a41, 0];
                    f(&finish_int(4, alpha, cart, lambda));
                }
            }
        }
    }
}

/// Five points in a chain.  The splitting weights are rational in the
/// intermediate steps; the primitive form `b` is always integral.
fn gen_iii(al15: i64, f: &mut impl FnMut(&LightRecord)) {
    for al13 in 5..=36i64 {
        for al35 in al13..=36 {
            let Some(sq) = sqrt_exact((al13 * al35 * al15) as i128) else {
                continue;
            };
            let sq = sq as i64;
            if sq == 0 {
                // collapsed outer edge: no splitting has a fifth column
                continue;
            }
            let d4 = 4 * (al13 + al35 + al15 - 4 + sq);
            if d4 % (al35 - 4) != 0 {
                continue;
            }
            let al14 = d4 / (al35 - 4);
            // threshold (8+4*sqrt(5))^2 = 287.108... sits between integers
            if al14 < 288 {
                continue;
            }
            if d4 % (al13 - 4) != 0 {
                continue;
            }
            let al25 = d4 / (al13 - 4);
            if al25 < 288 {
                continue;
            }
            let num24 = 4 * (al13 * al35 + 4 * al15 + 4 * sq);
            let den24 = (al35 - 4) * (al13 - 4);
            if num24 % den24 != 0 {
                continue;
            }
            let al24 = num24 / den24;
            let Some(sq1) = sqrt_exact(al13 as i128 * al35 as i128 * al25 as i128 * al24 as i128 * al14 as i128)
            else {
                continue;
            };
            let mut alpha = [[0i64; 5]; 5];
            for (i, row) in alpha.iter_mut().enumerate() {
                row[i] = 4;
            }
            sym_set(&mut alpha, 0, 2, al13);
            sym_set(&mut alpha, 0, 3, al14);
            sym_set(&mut alpha, 0, 4, al15);
            sym_set(&mut alpha, 1, 3, al24);
            sym_set(&mut alpha, 1, 4, al25);
            sym_set(&mut alpha, 2, 4, al35);
            let d14 = div_i64(al14);
            let d24 = div_i64(al24);
            for a13 in div_i64(al13) {
                let a31 = al13 / a13;
                for a35 in div_i64(al35) {
                    let a53 = al35 / a35;
                    if (al15 * a13 * a35) % sq != 0 {
                        continue;
                    }
                    let a15 = al15 * a13 * a35 / sq;
                    let a51 = Ratio::new(sq as i128, (a13 * a35) as i128);
                    for &a14 in &d14 {
                        let a41 = al14 / a14;
                        for &a24 in &d24 {
                            let a42 = al24 / a24;
                            let num52 = sq1 * a14 as i128;
                            let den52 = (a13 * a35) as i128 * a24 as i128 * al14 as i128;
                            if (al25 as i128 * den52) % num52 != 0 {
                                continue;
                            }
                            let a25 = al25 as i128 * den52 / num52;
                            let a52 = Ratio::new(num52, den52);
                            let mut cart = [[RZERO; 5]; 5];
                            for (i, row) in cart.iter_mut().enumerate() {
                                row[i] = rint(-2);
                            }
                            cart[0][2] = rint(a13);
                            cart[2][0] = rint(a31);
                            cart[0][3] = rint(a14);
                            cart[3][0] = rint(a41);
                            cart[0][4] = rint(a15);
                            cart[4][0] = a51;
                            cart[1][3] = rint(a24);
                            cart[3][1] = rint(a42);
                            cart[1][4] = rint128(a25);
                            cart[4][1] = a52;
                            cart[2][4] = rint(a35);
                            cart[4][2] = rint(a53);
                            let l14 = a14 as i128;
                            let l41 = a41 as i128;
                            let l13 = a13 as i128;
                            let l31 = a31 as i128;
                            let l24 = a24 as i128;
                            let l42 = a42 as i128;
                            let lambda = [
                                rint128(l14 * l13 * l42 * a25),
                                rint128(l41 * l13 * l24 * a25),
                                rint128(l14 * l31 * l42 * a25),
                                rint128(l41 * l13 * l42 * a25),
                                rint128(l41 * l13 * l24) * a52,
                            ];
                            f(&finish(5, alpha, cart, lambda));
                        }
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------
// shard plumbing

fn shard_keys(tag: NarrowType) -> Vec<(i64, i64)> {
    match tag {
        NarrowType::I1 => (1..=4)
            .flat_map(|x| (x..=4).map(move |y| (x, y)))
            .collect(),
        NarrowType::I0 => (1..=4).map(|y| (0, y)).collect(),
        NarrowType::II1 => (1..=4).map(|x| (x, 0)).collect(),
        NarrowType::II0 => (1..=287).map(|x| (x, 0)).collect(),
        NarrowType::III => (0..=900).map(|x| (x, 0)).collect(),
    }
}

fn run_shard(tag: NarrowType, key: (i64, i64), f: &mut impl FnMut(&LightRecord)) {
    match tag {
        NarrowType::I1 | NarrowType::I0 => gen_i(key.0, key.1, f),
        NarrowType::II1 => gen_ii1(key.0, f),
        NarrowType::II0 => gen_ii0(key.0, f),
        NarrowType::III => gen_iii(key.0, f),
    }
}

/// Count the narrow places of one configuration type and track the
/// extrema of the discriminant-exponent invariants.
pub fn narrow_stats(tag: NarrowType) -> EnumStats {
    shard_keys(tag)
        .into_par_iter()
        .map(|key| {
            let mut st = EnumStats::new();
            run_shard(tag, key, &mut |lr| st.absorb(disc_exponent(&lr.b, lr.k)));
            st
        })
        .reduce(EnumStats::new, EnumStats::merge)
}

/// Stream every narrow place of one configuration type in canonical
/// enumeration order.  The sink returns `false` to stop early.
pub fn enumerate_narrow(tag: NarrowType, mut sink: impl FnMut(NarrowPlaceRecord) -> bool) {
    for key in shard_keys(tag) {
        let mut recs = Vec::new();
        run_shard(tag, key, &mut |lr| recs.push(to_public(tag, lr)));
        for r in recs {
            if !sink(r) {
                return;
            }
        }
    }
}

// ---------------------------------------------------------------------
// the overlattice filter on the two-infinite-edge family

fn cartan_i64(lr: &LightRecord) -> [[i64; 5]; 5] {
    let mut out = [[0i64; 5]; 5];
    for i in 0..lr.k {
        for j in 0..lr.k {
            let e = lr.cartan[i][j];
            debug_assert!(e.is_integer());
            out[i][j] = e.to_integer() as i64;
        }
    }
    out
}

/// The cheap gates of the overlattice filter: square-free diagonal,
/// consecutive diagonal gcds at most 2, nontrivial discriminant group.
/// Returns the order of the discriminant group when all gates pass.
fn main_gate(b: &[[i64; 5]; 5], k: usize) -> Option<i128> {
    for i in 0..k {
        debug_assert!(b[i][i] < 0);
        if !is_squarefree((-b[i][i]) as u64) {
            return None;
        }
    }
    for i in 0..k - 1 {
        if gcd(-b[i][i], -b[i + 1][i + 1]) > 2 {
            return None;
        }
    }
    let detb = gcd_minors3(b, k);
    if detb == 1 {
        return None;
    }
    Some(detb)
}

/// Classify one gated form from the factorization `vals` of its
/// discriminant order: the surviving `(d, eta, doubled count)` if any.
fn classify_main(b: &[[i64; 5]; 5], k: usize, vals: &[(u64, u32)]) -> Option<(u64, u32, u64)> {
    let prod_diag: i128 = (0..k).map(|i| (-b[i][i]) as i128).product();
    let v2 = vals.iter().find(|&&(p, _)| p == 2).map_or(0, |&(_, v)| v);

    // a 2-group of type (2) x (4^odd) on a partially even diagonal
    // never extends to a main class
    if v2 % 2 == 1 {
        let g16 = gcd_i128(prod_diag, 16);
        if g16 > 1 && g16 < 16 {
            return None;
        }
    }
    // an odd prime with even valuation meeting the diagonal blocks
    // every extension
    for &(p, v) in vals {
        if p != 2 && v % 2 == 0 && prod_diag % p as i128 == 0 {
            return None;
        }
    }

    // A fully odd diagonal with odd 2-adic content is dropped; every
    // other form is classified by its unscaled discriminant data.
    let all_odd = prod_diag % 2 != 0;
    if all_odd && v2 % 2 == 1 {
        return None;
    }
    let b11 = b[0][0];
    let b22 = b[1][1];
    let mut d: u64 = if v2 % 2 == 1 { 2 } else { 1 };
    for &(p, v) in vals {
        if p != 2 && v % 2 == 1 {
            d = d.checked_mul(p).expect("squarefree kernel exceeds u64");
        }
    }
    let eta = if d <= 2 {
        0
    } else {
        let d1 = if d % 2 == 0 { d / 2 } else { d };
        let mut eta = 0u32;
        for (idx, &(p, _)) in factorize(d1).iter().enumerate() {
            let pi = p as i64;
            let x = if b11 % pi == 0 {
                b11 / pi
            } else if b22 % pi == 0 {
                b22 / pi
            } else {
                let t = d as i128 * b11 as i128 * b22 as i128 / pi as i128;
                t.rem_euclid(pi as i128) as i64
            };
            if kronecker(x, pi) != 1 {
                eta |= 1 << idx;
            }
        }
        eta
    };
    let h2 = hnr_doubled(d, eta);
    (h2 <= 2).then_some((d, eta, h2))
}

fn main_shard(alpha14: i64) -> Vec<(u64, u32, u64)> {
    let mut out = Vec::new();
    gen_ii0(alpha14, &mut |lr| {
        let Some(detb) = main_gate(&lr.b, 4) else {
            return;
        };

        // Every prime of detb divides a column weight or all 3x3 minors
        // of the Cartan matrix, so this factor base is complete.
        let mut fb: Vec<u64> = Vec::new();
        for j in 0..4 {
            let lam = u64::try_from(lr.lambda[j].to_integer()).unwrap();
            fb.extend(factorize(lam).into_iter().map(|(p, _)| p));
        }
        let g_all = gcd_minors3(&cartan_i64(lr), 4).unsigned_abs();
        fb.extend(factorize(u64::try_from(g_all).unwrap()).into_iter().map(|(p, _)| p));
        fb.sort_unstable();
        fb.dedup();
        let mut rem = detb;
        let mut vals: Vec<(u64, u32)> = Vec::new();
        for &p in &fb {
            let mut v = 0u32;
            while rem % p as i128 == 0 {
                rem /= p as i128;
                v += 1;
            }
            if v > 0 {
                vals.push((p, v));
            }
        }
        assert!(rem == 1, "uncovered prime in discriminant order");

        if let Some(t) = classify_main(&lr.b, 4, &vals) {
            out.push(t);
        }
    });
    out
}

fn finish_triplets(mut all: Vec<(u64, u32, u64)>) -> Vec<MainTriplet> {
    all.sort_unstable();
    all.dedup();
    all.into_iter()
        .map(|(d, eta, h2)| {
            assert!(h2 % 2 == 0, "kept class with half-integral count");
            MainTriplet { d, eta, h: h2 / 2 }
        })
        .collect()
}

/// Run the overlattice filter across the whole two-infinite-edge family
/// and return the surviving `(d, eta, h)` classes, deduplicated and
/// ordered by `(d, eta)`.
pub fn enumerate_main_triplets() -> Vec<MainTriplet> {
    finish_triplets(
        (1..=287i64)
            .into_par_iter()
            .flat_map_iter(main_shard)
            .collect(),
    )
}

/// Apply the same overlattice filter to any of the five families.  Only
/// the two-infinite-edge family carries a published survivor count; the
/// other four are exploratory.  Discriminant orders are factored
/// directly here, since the rational five-point splittings offer no
/// integral factor base.
pub fn enumerate_main_triplets_for(tag: NarrowType) -> Vec<MainTriplet> {
    finish_triplets(
        shard_keys(tag)
            .into_par_iter()
            .flat_map_iter(|key| {
                let mut out = Vec::new();
                run_shard(tag, key, &mut |lr| {
                    let Some(detb) = main_gate(&lr.b, lr.k) else {
                        return;
                    };
                    let vals =
                        factorize(u64::try_from(detb).expect("discriminant order exceeds u64"));
                    if let Some(t) = classify_main(&lr.b, lr.k, &vals) {
                        out.push(t);
                    }
                });
                out
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pencil_bounds_at_corners() {
        assert!((f_p2(1.0, 1.0, 1.0, 1.0) - 6.0).abs() < 1e-12);
        let (a1, a2, a3): (f64, f64, f64) = (0.3, 0.7, 0.5);
        let direct = (a1.sqrt() + a2.sqrt() + a3.sqrt()).powi(2);
        assert!((f_p2(a1, a2, a3, 0.0) - direct).abs() < 1e-12);
        assert!((f_p3(0.4, 0.9, 0.6, 0.8, 1.0, 1.0) - 4.0).abs() < 1e-12);
        let quad = (0.4f64.sqrt() + 0.9f64.sqrt() + 0.6f64.sqrt() + 0.8f64.sqrt()).powi(2);
        assert!((f_p3(0.4, 0.9, 0.6, 0.8, 0.0, 0.0) - quad).abs() < 1e-12);
    }

    #[test]
    fn shortening_identities() {
        // right angle collapses nothing at a = 0 (angle pi)
        assert!((g_root(std::f64::consts::PI, 2.0, 3.0) - 2.0).abs() < 1e-12);
        // zero angle shortens everything away
        assert!(g_root(0.0, 2.0, 3.0).abs() < 1e-12);
        // equal lengths: u (1 - sqrt((1+cos)/2))
        let u = 5.0f64;
        let a: f64 = 0.5 * (1.0 + (std::f64::consts::FRAC_PI_3).cos());
        let expect = u * (1.0 - a.sqrt());
        assert!((g_root(std::f64::consts::FRAC_PI_3, u, u) - expect).abs() < 1e-12);
    }

    #[test]
    fn bound_guard_is_inclusive_on_exact_squares() {
        assert_eq!(real_upper(196.0), 196);
        assert_eq!(real_upper(62.3939), 62);
        assert!(exceeds(63, 62.3939));
        assert!(!exceeds(62, 62.3939));
    }

    #[test]
    fn smallest_family_counts() {
        let st = narrow_stats(NarrowType::I1);
        assert_eq!((st.n, st.a, st.a1, st.a2), (272, 3528, 543, 181));
    }

    #[test]
    fn type_parsing_round_trips() {
        for t in NarrowType::ALL {
            assert_eq!(t.as_str().parse::<NarrowType>().unwrap(), t);
        }
        assert!("IV".parse::<NarrowType>().is_err());
    }

}
