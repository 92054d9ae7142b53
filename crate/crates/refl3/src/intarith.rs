//! Integer primitives: Kronecker symbol, factorization, divisors, perfect
//! squares, and Smith normal form invariants of integer matrices.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Non-negative greatest common divisor; `gcd(0, 0) == 0`.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least common multiple; `lcm(0, x) == 0`.
pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        (a / gcd(a, b) * b).abs()
    }
}

/// Gcd of all entries; 0 for an all-zero (or empty) slice.
pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0, |g, &x| gcd(g, x))
}

pub fn content_i128(v: &[i128]) -> i128 {
    v.iter().fold(0, |g, &x| gcd_i128(g, x))
}

/// `Some(r)` with `r*r == n` when `n` is a perfect square.
pub fn sqrt_exact(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

pub fn is_square(n: i128) -> bool {
    sqrt_exact(n).is_some()
}

/// Kronecker symbol `(a|b)`, extended to all integer arguments.
pub fn kronecker(mut a: i64, mut b: i64) -> i32 {
    // (2|x) indexed by x mod 8.
    const TAB2: [i32; 8] = [0, 1, 0, -1, 0, -1, 0, 1];
    if b == 0 {
        return i32::from(a.unsigned_abs() == 1);
    }
    if a & 1 == 0 && b & 1 == 0 {
        return 0;
    }
    let v = b.trailing_zeros();
    b >>= v;
    let mut k = if v & 1 == 0 { 1 } else { TAB2[(a & 7) as usize] };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        // invariant: b odd, b > 0
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        let v = a.trailing_zeros();
        a >>= v;
        if v & 1 == 1 {
            k *= TAB2[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            // both = 3 mod 4: quadratic reciprocity flips the sign
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin; the twelve smallest primes are a proven
/// witness set for the full u64 range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's cycle variant of Pollard's rho; `n` must be composite and odd.
fn brent_rho(n: u64) -> u64 {
    fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut power = 1u64;
        let mut lam = 1u64;
        while d == 1 {
            if power == lam {
                x = y;
                power *= 2;
                lam = 0;
            }
            y = f(y);
            lam += 1;
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn split(n: u64, primes: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        primes.push(n);
        return;
    }
    let d = brent_rho(n);
    split(d, primes);
    split(n / d, primes);
}

/// Prime factorization, `(prime, exponent)` pairs with primes ascending.
/// Trial division strips everything below 1e5; a surviving composite
/// cofactor is split by Miller-Rabin plus Brent's cycle finder.
/// `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factorize requires a positive argument");
    let mut out = Vec::new();
    {
        let mut push = |p: u64, n: &mut u64| {
            let mut e = 0;
            while *n % p == 0 {
                *n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
        };
        push(2, &mut n);
        push(3, &mut n);
        let mut p = 5;
        while p * p <= n && p < 100_000 {
            push(p, &mut n);
            push(p + 2, &mut n);
            p += 6;
        }
    }
    if n > 1 {
        if n < 100_000u64.pow(2) {
            out.push((n, 1));
        } else {
            // every remaining prime exceeds the trial bound, so the split
            // factors sort after everything found so far
            let mut rest = Vec::new();
            split(n, &mut rest);
            rest.sort_unstable();
            for p in rest {
                match out.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => out.push((p, 1)),
                }
            }
        }
    }
    out
}

/// All positive divisors in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1];
    for (p, e) in factorize(n) {
        let prev = out.len();
        let mut pe = 1;
        for _ in 0..e {
            pe *= p;
            for i in 0..prev {
                out.push(out[i] * pe);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn is_squarefree(n: u64) -> bool {
    assert!(n > 0, "is_squarefree requires a positive argument");
    let mut n = n;
    // Strips one copy of p; a second copy means a square divisor.
    let strip = |p: u64, n: &mut u64| -> bool {
        if *n % p == 0 {
            *n /= p;
            if *n % p == 0 {
                return false;
            }
        }
        true
    };
    if !strip(2, &mut n) || !strip(3, &mut n) {
        return false;
    }
    let mut p = 5;
    while p * p <= n {
        if !strip(p, &mut n) || !strip(p + 2, &mut n) {
            return false;
        }
        p += 6;
    }
    true
}

/// Product of the distinct odd prime divisors; `odd_radical(2^k) == 1`.
pub fn odd_radical(n: u64) -> u64 {
    factorize(n)
        .iter()
        .filter(|&&(p, _)| p != 2)
        .map(|&(p, _)| p)
        .product()
}

/// Largest prime divisor (2 counts); 0 when `n <= 1`.
pub fn greatest_prime(n: u64) -> u64 {
    if n <= 1 {
        return 0;
    }
    factorize(n).last().map(|&(p, _)| p).unwrap()
}

static SPF: once_cell::sync::Lazy<std::sync::RwLock<Vec<u32>>> =
    once_cell::sync::Lazy::new(Default::default);

fn with_spf<R>(need: usize, f: impl FnOnce(&[u32]) -> R) -> R {
    {
        let table = SPF.read().unwrap();
        if table.len() > need {
            return f(&table);
        }
    }
    let mut table = SPF.write().unwrap();
    if table.len() <= need {
        let cap = (need + 1).next_power_of_two().max(1 << 10);
        let mut spf = vec![0u32; cap];
        for i in 2..cap {
            if spf[i] == 0 {
                spf[i] = i as u32;
                let mut j = i * i;
                while j < cap {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        *table = spf;
    }
    f(&table)
}

/// `chi[r] = kronecker(d, r)` for `0 <= r < bound`, filled multiplicatively
/// from a smallest-prime-factor table so only prime `r` pay for a symbol
/// evaluation.
pub(crate) fn kronecker_row(d: i64, bound: usize) -> Vec<i8> {
    with_spf(bound, |spf| {
        let mut chi = vec![0i8; bound.max(2)];
        chi[1] = 1;
        for r in 2..bound {
            let p = spf[r] as usize;
            chi[r] = if p == r {
                kronecker(d, r as i64) as i8
            } else {
                chi[p] * chi[r / p]
            };
        }
        chi.truncate(bound);
        chi
    })
}

/// Smith normal form invariants of a square integer matrix, largest first:
/// zeros (one per rank deficiency), then the nonzero invariants in
/// decreasing divisibility order, so `out[0]` divides nothing and the last
/// entry divides all others.
pub fn smith_invariants(m: &[Vec<i128>]) -> Vec<BigInt> {
    let n = m.len();
    for row in m {
        assert_eq!(row.len(), n, "square matrix required");
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut divs: Vec<BigInt> = Vec::new();
    let mut t = 0;
    while t < n {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..n {
            for j in t..n {
                if !a[i][j].is_zero()
                    && best
                        .map(|(bi, bj): (usize, usize)| a[i][j].magnitude() < a[bi][bj].magnitude())
                        .unwrap_or(true)
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        if bj != t {
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
        }
        loop {
            let mut again = false;
            for i in t + 1..n {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = &a[i][t] / &a[t][t];
                if !q.is_zero() {
                    for j in t..n {
                        let s = &a[t][j] * &q;
                        a[i][j] -= s;
                    }
                }
                if !a[i][t].is_zero() {
                    // remainder is strictly smaller: promote it to pivot
                    a.swap(t, i);
                    again = true;
                }
            }
            if again {
                continue;
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = &a[t][j] / &a[t][t];
                if !q.is_zero() {
                    for i in t..n {
                        let s = &a[i][t] * &q;
                        a[i][j] -= s;
                    }
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    again = true;
                }
            }
            if again {
                continue;
            }
            // the pivot must divide the whole trailing block
            let mut dirty = false;
            'scan: for i in t + 1..n {
                for j in t + 1..n {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        for jj in t..n {
                            let s = a[i][jj].clone();
                            a[t][jj] += s;
                        }
                        dirty = true;
                        break 'scan;
                    }
                }
            }
            if !dirty {
                break;
            }
        }
        divs.push(a[t][t].abs());
        t += 1;
    }
    let mut out = vec![BigInt::zero(); n - divs.len()];
    out.extend(divs.into_iter().rev());
    out
}

/// Largest nonzero Smith invariant (the exponent of the discriminant
/// group); 0 for the zero matrix.
pub fn exponent_of_discriminant(m: &[Vec<i128>]) -> BigInt {
    smith_invariants(m)
        .into_iter()
        .find(|d| !d.is_zero())
        .unwrap_or_else(BigInt::zero)
}
