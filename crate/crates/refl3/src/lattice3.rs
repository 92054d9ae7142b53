//! Main hyperbolic rank-3 lattices of square-free determinant d: existence,
//! the count hnr(d, eta) of classes of non-reflective central symmetries, and
//! the sweep that lists all (d, eta) with small hnr.
//!
//! A lattice is identified by (d, eta) where bit i-1 of `eta` is the local
//! invariant at the i-th smallest odd prime divisor of d. Central symmetries
//! correspond to primitive sublattices whose orthogonal complement is a
//! definite binary lattice; hnr adds up non-ambiguous class counts of the
//! complement genera over the admissible sublattice norms.

use crate::binquad::raw_counts;
use crate::intarith::{divisors, factorize, is_squarefree, kronecker};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("determinant {0} must be a positive square-free integer")]
    NotSquareFree(u64),
    #[error("invariant tag {eta} out of range for {d}: need eta < 2^{t}")]
    EtaOutOfRange { d: u64, eta: u32, t: u32 },
    #[error("no main lattice has invariants ({d}, {eta})")]
    NoSuchLattice { d: u64, eta: u32 },
}

/// Invariants (d, eta) of a main hyperbolic rank-3 lattice; `new` enforces
/// existence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeInvariants {
    pub d: u64,
    pub eta: u32,
}

impl LatticeInvariants {
    pub fn new(d: u64, eta: u32) -> Result<Self, LatticeError> {
        if exists_main_lattice(d, eta)? {
            Ok(Self { d, eta })
        } else {
            Err(LatticeError::NoSuchLattice { d, eta })
        }
    }
}

fn odd_primes_of(d: u64) -> Vec<u64> {
    factorize(d)
        .iter()
        .map(|&(p, _)| p)
        .filter(|&p| p != 2)
        .collect()
}

fn validate(d: u64, eta: u32) -> Result<Vec<u64>, LatticeError> {
    if d == 0 || !is_squarefree(d) {
        return Err(LatticeError::NotSquareFree(d));
    }
    let primes = odd_primes_of(d);
    let t = primes.len() as u32;
    if t < 32 && eta >= 1 << t {
        return Err(LatticeError::EtaOutOfRange { d, eta, t });
    }
    Ok(primes)
}

/// Signature sum over the odd primes of d dividing `modulus`:
/// sum (1 - p + 4*eta_p) reduced mod 8.
fn sig_sum(odd_primes: &[u64], eta: u32, modulus: u64) -> u64 {
    odd_primes
        .iter()
        .enumerate()
        .filter(|&(_, &p)| modulus % p == 0)
        .fold(0i64, |u, (k, &p)| {
            u + 1 - p as i64 + 4 * i64::from(eta >> k & 1)
        })
        .rem_euclid(8) as u64
}

/// Whether a main lattice with invariants (d, eta) exists: always for odd d;
/// for even d the signature congruence sum = 0 or -2 mod 8 must hold.
pub fn exists_main_lattice(d: u64, eta: u32) -> Result<bool, LatticeError> {
    let primes = validate(d, eta)?;
    Ok(d % 2 == 1 || matches!(sig_sum(&primes, eta, d), 0 | 6))
}

/// eta shifted by the quadratic character of -1: bit k flips when
/// p_k = 3 mod 4.
fn eps_shift(odd_primes: &[u64], eta: u32) -> u32 {
    odd_primes.iter().enumerate().fold(eta, |m, (k, &p)| {
        m ^ ((((p >> 1) & 1) as u32) << k)
    })
}

/// eta shifted by the characters of -1 and 2: bit k additionally flips when
/// p_k = 3, 5 mod 8.
fn eps_omega_shift(odd_primes: &[u64], eta: u32) -> u32 {
    odd_primes.iter().enumerate().fold(
        eps_shift(odd_primes, eta),
        |m, (k, &p)| m ^ (u32::from(matches!(p % 8, 3 | 5)) << k),
    )
}

/// Repack the bits of `mask` (indexed by `odd_primes`) onto the sub-list of
/// primes dividing `t`, keeping ascending order.
fn restrict_bits(odd_primes: &[u64], mask: u32, t: u64) -> u32 {
    let mut out = 0;
    let mut j = 0;
    for (k, &p) in odd_primes.iter().enumerate() {
        if t % p == 0 {
            out |= (mask >> k & 1) << j;
            j += 1;
        }
    }
    out
}

/// Character condition at every odd prime of n: kronecker(n/p, p) must equal
/// (-1)^(eta_p).
fn admissible_norm(odd_primes: &[u64], eta: u32, n: u64) -> bool {
    odd_primes.iter().enumerate().all(|(k, &p)| {
        if n % p != 0 {
            return true;
        }
        let want = if eta >> k & 1 == 1 { -1 } else { 1 };
        kronecker((n / p) as i64, p as i64) == want
    })
}

/// Doubled count of non-reflective central-symmetry classes: twice the GP
/// value, which keeps every summand integral even on half-integral
/// non-ambiguous slots of unrealizable genera (those never arise for
/// existing lattices, but the narrow-place filter feeds this raw sums whose
/// existence it does not pre-check).
pub(crate) fn hnr_doubled(d: u64, eta: u32) -> u64 {
    let odd_primes = odd_primes_of(d);
    let eps = eps_shift(&odd_primes, eta);
    let mut total = 0u64;
    if d % 2 == 1 {
        for n in divisors(d) {
            if !admissible_norm(&odd_primes, eta, n) {
                continue;
            }
            let cof = d / n;
            let mu = restrict_bits(&odd_primes, eps, cof);
            let s = sig_sum(&odd_primes, eta, cof);
            // complement an even binary lattice
            if s == 6 {
                total += raw_counts(-(cof as i64), mu).2;
            }
            // complement an odd binary lattice; (cof^2 - 1)/2 mod 8 only
            // depends on cof mod 16
            if (s + (cof % 16) * (cof % 16) / 2) % 8 != 2 {
                total += raw_counts(-4 * cof as i64, mu).2;
            }
        }
        // even sublattice norms n = 2*n1
        for n1 in divisors(d) {
            if !admissible_norm(&odd_primes, eta, 2 * n1) {
                continue;
            }
            let cof = d / n1;
            total += raw_counts(-8 * cof as i64, restrict_bits(&odd_primes, eps, cof)).2;
        }
    } else {
        let eps_om = eps_omega_shift(&odd_primes, eta);
        let full = sig_sum(&odd_primes, eta, d);
        // n/2 = -sum - 1 mod 4 admits an even-complement splitting
        let even_target = (7 - full % 4) % 4;
        let half = d / 2;
        for n1 in divisors(half) {
            let n = 2 * n1;
            if !admissible_norm(&odd_primes, eta, n) {
                continue;
            }
            let cof = half / n1;
            if n1 % 4 == even_target {
                total += raw_counts(-(cof as i64), restrict_bits(&odd_primes, eps, cof)).2;
            }
            let mu = restrict_bits(&odd_primes, eps_om, cof);
            if n1 % 4 == (4 - half % 4) % 4 {
                total += raw_counts(-4 * cof as i64, mu).2;
            } else if n < d {
                // n1 = d/2 mod 4: two non-ambiguous orbits plus the type-II
                // ambiguous classes of the complement genus
                let r = raw_counts(-4 * cof as i64, mu);
                total += 2 * r.2 + 2 * r.1;
            }
        }
    }
    total
}

/// Number of classes of non-reflective central symmetries of the main
/// lattice (d, eta).
pub fn hnr(d: u64, eta: u32) -> Result<u64, LatticeError> {
    if !exists_main_lattice(d, eta)? {
        return Err(LatticeError::NoSuchLattice { d, eta });
    }
    let doubled = hnr_doubled(d, eta);
    assert!(doubled % 2 == 0, "fractional class count at ({d}, {eta})");
    Ok(doubled / 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowHnrEntry {
    pub d: u64,
    pub eta: u32,
    pub h: u64,
}

fn enumerate_filtered(max_d: u64, keep: impl Fn(u64) -> bool + Sync) -> Vec<LowHnrEntry> {
    (1..=max_d)
        .into_par_iter()
        .filter(|&d| is_squarefree(d))
        .map(|d| {
            if d <= 2 {
                return if keep(0) {
                    vec![LowHnrEntry { d, eta: 0, h: 0 }]
                } else {
                    vec![]
                };
            }
            let t = odd_primes_of(d).len() as u32;
            (0..1u32 << t)
                .filter(|&eta| exists_main_lattice(d, eta) == Ok(true))
                .filter_map(|eta| {
                    let h = hnr(d, eta).expect("existence checked");
                    keep(h).then_some(LowHnrEntry { d, eta, h })
                })
                .collect()
        })
        .flatten()
        .collect()
}

/// All (d, eta, hnr) with d <= max_d and hnr <= hmax, ordered by (d, eta).
/// d = 1, 2 are emitted directly with h = 0.
pub fn enumerate_low_hnr(max_d: u64, hmax: u64) -> Vec<LowHnrEntry> {
    enumerate_filtered(max_d, |h| h <= hmax)
}

/// All (d, eta, hnr) with d <= max_d and hnr exactly h, ordered by (d, eta).
pub fn enumerate_exact_hnr(max_d: u64, h: u64) -> Vec<LowHnrEntry> {
    enumerate_filtered(max_d, |got| got == h)
}
