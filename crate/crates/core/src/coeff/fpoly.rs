//! Dense polynomials over a prime field `F_l`, coefficients low-degree-first.
//!
//! Everything here works on plain `u64` residues; `l` must be below `2^63`
//! so that sums fit and products are done in `u128`.

use std::sync::Mutex;

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, l: u64) -> u64 {
    if a | b < SMALL {
        return a * b % l;
    }
    ((a as u128 * b as u128) % l as u128) as u64
}

#[inline]
pub(crate) fn addmod(a: u64, b: u64, l: u64) -> u64 {
    let s = a + b;
    if s >= l {
        s - l
    } else {
        s
    }
}

#[inline]
pub(crate) fn submod(a: u64, b: u64, l: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + l - b
    }
}

pub(crate) fn powmod(mut base: u64, mut exp: u64, l: u64) -> u64 {
    let mut acc = 1 % l;
    base %= l;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, l);
        }
        base = mulmod(base, base, l);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime `l`; `a` must be nonzero mod `l`.
pub(crate) fn invmod(a: u64, l: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(l));
    powmod(a, l - 2, l)
}

/// Reduce a signed integer into `[0, l)`.
pub(crate) fn reduce_i64(a: i64, l: u64) -> u64 {
    a.rem_euclid(l as i64) as u64
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for d in [2u64, 3, 5, 7, 11, 13] {
        if n.is_multiple_of(d) {
            return n == d;
        }
    }
    let mut d = 17;
    while d * d <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Prime factorization by trial division, as `(prime, multiplicity)` in
/// increasing order.
pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

static CRT_PRIMES: Mutex<Vec<u64>> = Mutex::new(Vec::new());

/// The `i`-th prime below `2^31`, counting downwards. Used for multimodular
/// reconstruction; these never coincide with a residue characteristic at
/// desk scale.
pub(crate) fn crt_prime(i: usize) -> u64 {
    let mut primes = CRT_PRIMES.lock().unwrap_or_else(|e| e.into_inner());
    let mut candidate = primes.last().map_or((1u64 << 31) - 1, |&p| p - 2);
    while primes.len() <= i {
        if is_prime(candidate) {
            primes.push(candidate);
        }
        candidate -= 2;
    }
    primes[i]
}

pub(crate) fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

pub(crate) fn degree(p: &[u64]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

/// Moduli below this bound multiply in `u64` and accumulate in `u128`
/// without intermediate reduction.
const SMALL: u64 = 1 << 32;

pub(crate) fn poly_mul(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = if l < SMALL {
        let mut acc = vec![0u128; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                acc[i + j] += (x * y) as u128;
            }
        }
        acc.into_iter().map(|c| (c % l as u128) as u64).collect()
    } else {
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = addmod(out[i + j], mulmod(x, y, l), l);
            }
        }
        out
    };
    trim(&mut out);
    out
}

pub(crate) fn poly_sub(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            submod(
                a.get(i).copied().unwrap_or(0),
                b.get(i).copied().unwrap_or(0),
                l,
            )
        })
        .collect();
    trim(&mut out);
    out
}

/// Quotient and remainder of `a` by a nonzero `b`.
pub(crate) fn poly_divrem(a: &[u64], b: &[u64], l: u64) -> (Vec<u64>, Vec<u64>) {
    let db = degree(b).expect("division by zero polynomial");
    let mut r: Vec<u64> = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let inv_lc = invmod(b[db], l);
    let mut q = vec![0u64; r.len() - db];
    if l < SMALL {
        // Subtract `c·b` as `c·(l - b)`; each entry receives at most
        // `db + 1` additions below `2^64`.
        let neg: Vec<u64> = b[..db]
            .iter()
            .map(|&x| if x == 0 { 0 } else { l - x })
            .collect();
        let mut acc: Vec<u128> = r.iter().map(|&x| x as u128).collect();
        for k in (db..acc.len()).rev() {
            let rk = (acc[k] % l as u128) as u64;
            let c = rk * inv_lc % l;
            if c == 0 {
                continue;
            }
            q[k - db] = c;
            for (j, &nb) in neg.iter().enumerate() {
                acc[k - db + j] += (c * nb) as u128;
            }
        }
        r = acc[..db].iter().map(|&x| (x % l as u128) as u64).collect();
    } else {
        for k in (db..r.len()).rev() {
            let c = mulmod(r[k], inv_lc, l);
            if c == 0 {
                continue;
            }
            q[k - db] = c;
            for j in 0..=db {
                r[k - db + j] = submod(r[k - db + j], mulmod(c, b[j], l), l);
            }
        }
        r.truncate(db);
    }
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

pub(crate) fn poly_rem(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    poly_divrem(a, b, l).1
}

pub(crate) fn poly_monic(a: &[u64], l: u64) -> Vec<u64> {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let inv = invmod(a[d], l);
            a[..=d].iter().map(|&c| mulmod(c, inv, l)).collect()
        }
    }
}

pub(crate) fn poly_gcd(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, l);
        x = y;
        y = r;
    }
    poly_monic(&x, l)
}

pub(crate) fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], l: u64) -> Vec<u64> {
    poly_rem(&poly_mul(a, b, l), m, l)
}

pub(crate) fn poly_powmod(base: &[u64], mut exp: u128, m: &[u64], l: u64) -> Vec<u64> {
    let mut acc = poly_rem(&[1], m, l);
    let mut b = poly_rem(base, m, l);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, l);
        }
        b = poly_mulmod(&b, &b, m, l);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub(crate) fn poly_invmod(a: &[u64], m: &[u64], l: u64) -> Option<Vec<u64>> {
    // Extended Euclid tracking only the coefficient of `a`.
    let mut r0 = m.to_vec();
    trim(&mut r0);
    let mut r1 = poly_rem(a, m, l);
    let mut s0: Vec<u64> = Vec::new();
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, r) = poly_divrem(&r0, &r1, l);
        let s = poly_sub(&s0, &poly_mul(&q, &s1, l), l);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    if degree(&r0) != Some(0) {
        return None;
    }
    let inv = invmod(r0[0], l);
    let out: Vec<u64> = s0.iter().map(|&c| mulmod(c, inv, l)).collect();
    Some(poly_rem(&out, m, l))
}

/// `Res(f, g)` over `F_l` for nonzero `f`, `g`, with their true degrees.
pub(crate) fn resultant(f: &[u64], g: &[u64], l: u64) -> u64 {
    let mut a = f.to_vec();
    let mut b = g.to_vec();
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut acc = 1u64;
    loop {
        let da = a.len() - 1;
        let db = b.len() - 1;
        if db == 0 {
            return mulmod(acc, powmod(b[0], da as u64, l), l);
        }
        let r = poly_rem(&a, &b, l);
        if r.is_empty() {
            return 0;
        }
        let dr = r.len() - 1;
        // Res(a, b) = (-1)^{da db} lc(b)^{da - dr} Res(b, r)
        if (da * db) % 2 == 1 {
            acc = submod(0, acc, l);
        }
        acc = mulmod(acc, powmod(b[db], (da - dr) as u64, l), l);
        a = b;
        b = r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_reconstructs() {
        let l = 101;
        let a = vec![3, 0, 7, 1, 99];
        let b = vec![5, 1, 2];
        let (q, r) = poly_divrem(&a, &b, l);
        let back = poly_sub(&poly_mul(&q, &b, l), &poly_sub(&[], &r, l), l);
        let mut a2 = a.clone();
        trim(&mut a2);
        assert_eq!(back, a2);
    }

    #[test]
    fn resultant_of_linear_factors() {
        // Res((x-2)(x-3), x-5) = (2-5)(3-5) = 6
        let l = 1_000_003;
        let f = poly_mul(&[l - 2, 1], &[l - 3, 1], l);
        assert_eq!(resultant(&f, &[l - 5, 1], l), 6);
    }

    #[test]
    fn inverse_mod_irreducible() {
        let l = 7;
        let m = vec![1, 1, 1]; // x^2 + x + 1, splits mod 7 but gcd with x+1 is 1
        let a = vec![1, 1];
        let inv = poly_invmod(&a, &m, l).unwrap();
        assert_eq!(poly_mulmod(&a, &inv, &m, l), vec![1]);
    }

    #[test]
    fn crt_primes_descend() {
        assert_eq!(crt_prime(0), 2_147_483_647);
        assert!(crt_prime(3) < crt_prime(2));
        assert!(is_prime(crt_prime(5)));
    }

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
    }
}
