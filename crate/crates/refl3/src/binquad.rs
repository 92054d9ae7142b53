//! Class numbers of negative fundamental discriminants and the partition of
//! form classes per genus into ambiguous classes (types I and II) and
//! non-ambiguous classes.
//!
//! A fundamental discriminant here is D < 0 with either D = 1 mod 4 and |D|
//! square-free, or D = -4, 4, 8 mod 16 and |D|/4 square-free. A genus is a
//! pair (D, mu) where bit i-1 of `mu` is the local invariant at the i-th
//! smallest odd prime divisor of D.

use crate::intarith::{divisors, factorize, gcd, is_squarefree, kronecker};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::sync::RwLock;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenusError {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("genus tag {mu} out of range for {d}: need mu < 2^{k}")]
    TagOutOfRange { d: i64, mu: u32, k: u32 },
    #[error("no form class realizes the genus ({d}, {mu})")]
    Unrealizable { d: i64, mu: u32 },
}

/// A genus of fundamental binary positive lattices, identified by the
/// discriminant and the bitmask of local invariants at odd primes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenusLabel {
    pub d: i64,
    pub mu: u32,
}

impl GenusLabel {
    pub fn new(d: i64, mu: u32) -> Result<Self, GenusError> {
        if !is_fundamental(d) {
            return Err(GenusError::NotFundamental(d));
        }
        let k = odd_prime_count(d);
        if k < 32 && mu >= 1 << k {
            return Err(GenusError::TagOutOfRange { d, mu, k });
        }
        Ok(Self { d, mu })
    }
}

/// Per-genus class counts: ambiguous classes of type I and type II, and
/// classes of non-ambiguous lattices under general equivalence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusClassCounts {
    #[serde(rename = "hrI")]
    pub hr_i: u64,
    #[serde(rename = "hrII")]
    pub hr_ii: u64,
    pub hnr: u64,
}

pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    if d.rem_euclid(4) == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    matches!(d.rem_euclid(16), 4 | 8 | 12) && is_squarefree(d.unsigned_abs() / 4)
}

fn odd_prime_count(d: i64) -> u32 {
    factorize(d.unsigned_abs())
        .iter()
        .filter(|&&(p, _)| p != 2)
        .count() as u32
}

static H_CACHE: Lazy<RwLock<HashMap<i64, u64>>> = Lazy::new(Default::default);

/// Class number h(D) of a fundamental discriminant D < 0, memoized.
///
/// Field discriminants (D = 1 mod 4, -4 mod 16, 8 mod 16) go through the
/// Dirichlet sum; D = 4 mod 16 is the odd-lattice case 4*D0 and is routed
/// through [`class_number_4d`], since the plain sum only covers maximal
/// orders.
pub fn class_number(d: i64) -> u64 {
    assert!(is_fundamental(d), "{d} is not a fundamental discriminant");
    if let Some(&h) = H_CACHE.read().unwrap().get(&d) {
        return h;
    }
    let h = if d.rem_euclid(16) == 4 {
        class_number_4d(d / 4)
    } else {
        dirichlet(d)
    };
    H_CACHE.write().unwrap().insert(d, h);
    h
}

fn dirichlet(d: i64) -> u64 {
    let w: i64 = match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    let dd = -d;
    let chi = crate::intarith::kronecker_row(d, dd as usize);
    let sum: i64 = (1..dd).map(|r| i64::from(chi[r as usize]) * r).sum();
    let num = w * sum.abs();
    assert!(num > 0 && num % (2 * dd) == 0, "Dirichlet sum broke for {d}");
    (num / (2 * dd)) as u64
}

/// h(4D) for fundamental D = 1 mod 4: the three-case overlattice count.
pub fn class_number_4d(d: i64) -> u64 {
    assert!(
        d.rem_euclid(4) == 1 && is_fundamental(d),
        "{d} is not a fundamental discriminant = 1 mod 4"
    );
    if d == -3 {
        1
    } else if d.rem_euclid(8) == 1 {
        class_number(d)
    } else {
        3 * class_number(d)
    }
}

/// Brute-force oracle: count reduced primitive positive forms (a,b,c) of
/// discriminant d = b^2 - 4ac, i.e. -a < b <= a <= c with b >= 0 when
/// a = c and gcd(a,b,c) = 1. Valid for any d < 0 with d = 0, 1 mod 4.
pub fn class_number_reduced(d: i64) -> u64 {
    assert!(d < 0 && d.rem_euclid(4) <= 1, "{d} is not a discriminant");
    let dd = -d;
    let mut count = 0;
    for a in 1..=(dd / 3).isqrt() {
        for b in (1 - a)..=a {
            let num = b * b + dd;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (a == c && b < 0) || gcd(gcd(a, b), c) != 1 {
                continue;
            }
            count += 1;
        }
    }
    count
}

/// tau(D): the number of genera of D is 2^tau.
pub fn tau(d: i64) -> u32 {
    assert!(is_fundamental(d), "{d} is not a fundamental discriminant");
    let t = factorize(d.unsigned_abs()).len() as u32;
    if d.rem_euclid(16) == 4 {
        t - 2
    } else {
        t - 1
    }
}

/// Whether some form class has the local invariants (D, mu).
///
/// For D = 1 mod 4 this is the signature congruence
/// sum_p [(1-p) + 4 mu_p] = 2 mod 8 over primes of |D|; for D = 4 mod 16
/// the same congruence on |D|/4 after twisting each mu_p by (2|p), which
/// translates the odd-lattice convention into the even one; D = -4, 8
/// mod 16 impose no condition.
pub fn is_realizable(g: GenusLabel) -> bool {
    let m16 = g.d.rem_euclid(16);
    if g.d.rem_euclid(4) == 1 {
        signature_sum(g.d.unsigned_abs(), g.mu) == 2
    } else if m16 == 4 {
        let dd = g.d.unsigned_abs() / 4;
        let twist = factorize(dd)
            .iter()
            .enumerate()
            .fold(0u32, |m, (k, &(p, _))| {
                m | (u32::from(kronecker(2, p as i64) == -1) << k)
            });
        signature_sum(dd, g.mu ^ twist) == 2
    } else {
        true
    }
}

fn signature_sum(dd: u64, mu: u32) -> u64 {
    factorize(dd)
        .iter()
        .enumerate()
        .fold(0i64, |u, (k, &(p, _))| {
            u + (1 - p as i64) + 4 * i64::from(mu >> k & 1)
        })
        .rem_euclid(8) as u64
}

// (hrI, hrII, doubled hnr slot). The doubled slot h(D)/2^t - hrI - hrII is
// always an integer, while the hnr count itself is half of it and can be a
// half-integer for unrealizable genera; every internal consumer sums the
// doubled value exactly.
pub(crate) type RawCounts = (u64, u64, u64);

static RAW_CACHE: Lazy<RwLock<HashMap<(i64, u32), RawCounts>>> = Lazy::new(Default::default);

/// Ambiguous-class count over divisor splittings of `top`: each divisor
/// dd1 (paired with cofactor `whole`/dd1, restricted to dd1 <= top/dd1
/// when `half`) counts when the character of the splitting matches `mu`
/// at every prime of `primes`.
fn count_splittings(top: u64, whole: u64, primes: &[u64], mu: u32, mult: i64, half: bool) -> u64 {
    let mut hr = 0;
    for dd1 in divisors(top) {
        if half && dd1 > top / dd1 {
            continue;
        }
        let ok = primes.iter().enumerate().all(|(k, &p)| {
            let x = if dd1 % p == 0 {
                dd1 / p
            } else {
                (whole / dd1) / p
            };
            let want = if mu >> k & 1 == 1 { -1 } else { 1 };
            kronecker(mult * x as i64, p as i64) == want
        });
        hr += u64::from(ok);
    }
    hr
}

/// The four congruence branches. Discriminants missing every branch
/// (D = 2, 3 mod 4 or D = 0 mod 16) yield (0, 0, 0), which is what the
/// lattice3 sums rely on for their vanishing terms.
pub(crate) fn raw_counts(d: i64, mu: u32) -> RawCounts {
    if let Some(&r) = RAW_CACHE.read().unwrap().get(&(d, mu)) {
        return r;
    }
    let r = raw_counts_uncached(d, mu);
    RAW_CACHE.write().unwrap().insert((d, mu), r);
    r
}

fn raw_counts_uncached(d: i64, mu: u32) -> RawCounts {
    let with_h = |hr_i: u64, hr_ii: u64, t: u32| -> RawCounts {
        let h = class_number(d);
        assert!(h % (1 << t) == 0, "2^tau must divide h({d})");
        let per_genus = h >> t;
        assert!(per_genus >= hr_i + hr_ii, "ambiguous count exceeds genus size for {d}");
        (hr_i, hr_ii, per_genus - hr_i - hr_ii)
    };
    match (d.rem_euclid(4), d.rem_euclid(16)) {
        (1, _) => {
            let dd = d.unsigned_abs();
            let primes: Vec<u64> = factorize(dd).iter().map(|&(p, _)| p).collect();
            let hr = count_splittings(dd, dd, &primes, mu, 2, true);
            with_h(0, hr, primes.len() as u32 - 1)
        }
        (_, 4) => {
            let dd = d.unsigned_abs() / 4;
            let primes: Vec<u64> = factorize(dd).iter().map(|&(p, _)| p).collect();
            let hr = count_splittings(dd, dd, &primes, mu, 1, true);
            with_h(hr, 0, primes.len() as u32 - 1)
        }
        (_, 8) => {
            let dd = d.unsigned_abs() / 4;
            if dd == 2 {
                return (1, 0, 0);
            }
            let primes: Vec<u64> = factorize(dd / 2).iter().map(|&(p, _)| p).collect();
            let hr = count_splittings(dd / 2, dd, &primes, mu, 1, false);
            with_h(hr, 0, primes.len() as u32)
        }
        (_, 12) => {
            let dd = d.unsigned_abs() / 4;
            if dd == 1 {
                return (1, 1, 0);
            }
            let primes: Vec<u64> = factorize(dd).iter().map(|&(p, _)| p).collect();
            let hr_i = count_splittings(dd, dd, &primes, mu, 1, true);
            let hr_ii = count_splittings(dd, dd, &primes, mu, 2, true);
            with_h(hr_i, hr_ii, primes.len() as u32)
        }
        _ => (0, 0, 0),
    }
}

/// Class counts of the genus (D, mu).
///
/// For a realizable genus the hnr slot is exact and satisfies
/// hrI + hrII + 2*hnr = h(D)/2^tau (D != -4). An unrealizable mu yields
/// (0, 0, h(D)/2^(tau+1)) where the last slot is floored when
/// h(D)/2^tau is odd; use [`genus_counts_strict`] to reject such inputs
/// instead.
pub fn genus_counts(g: GenusLabel) -> GenusClassCounts {
    let (hr_i, hr_ii, hnr2) = raw_counts(g.d, g.mu);
    GenusClassCounts {
        hr_i,
        hr_ii,
        hnr: hnr2 / 2,
    }
}

/// Like [`genus_counts`] but errors on genera no form class realizes.
pub fn genus_counts_strict(g: GenusLabel) -> Result<GenusClassCounts, GenusError> {
    if !is_realizable(g) {
        return Err(GenusError::Unrealizable { d: g.d, mu: g.mu });
    }
    let (hr_i, hr_ii, hnr2) = raw_counts(g.d, g.mu);
    assert!(hnr2 % 2 == 0, "odd non-ambiguous slot on realizable genus ({}, {})", g.d, g.mu);
    Ok(GenusClassCounts {
        hr_i,
        hr_ii,
        hnr: hnr2 / 2,
    })
}

pub fn class_cache_len() -> usize {
    H_CACHE.read().unwrap().len()
}

/// Load "D h" pairs (one per line, space-separated ASCII) into the shared
/// class-number cache; returns how many entries were read.
pub fn load_class_cache(path: &Path) -> io::Result<usize> {
    let file = match std::fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
        Err(e) => return Err(e),
    };
    let mut n = 0;
    let mut cache = H_CACHE.write().unwrap();
    for line in io::BufReader::new(file).lines() {
        let line = line?;
        let mut it = line.split_ascii_whitespace();
        let (Some(d), Some(h)) = (it.next(), it.next()) else {
            continue;
        };
        let (Ok(d), Ok(h)) = (d.parse::<i64>(), h.parse::<u64>()) else {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("bad cache line: {line}"),
            ));
        };
        cache.insert(d, h);
        n += 1;
    }
    Ok(n)
}

/// Append cache entries the file does not already contain, in |D|-ascending
/// order; returns how many lines were written.
pub fn append_class_cache(path: &Path) -> io::Result<usize> {
    let mut known = std::collections::HashSet::new();
    if let Ok(f) = std::fs::File::open(path) {
        for line in io::BufReader::new(f).lines() {
            if let Some(d) = line?.split_ascii_whitespace().next() {
                if let Ok(d) = d.parse::<i64>() {
                    known.insert(d);
                }
            }
        }
    }
    let mut fresh: Vec<(i64, u64)> = H_CACHE
        .read()
        .unwrap()
        .iter()
        .filter(|(d, _)| !known.contains(d))
        .map(|(&d, &h)| (d, h))
        .collect();
    fresh.sort_by_key(|&(d, _)| -d);
    let mut out = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    for (d, h) in &fresh {
        writeln!(out, "{d} {h}")?;
    }
    Ok(fresh.len())
}
