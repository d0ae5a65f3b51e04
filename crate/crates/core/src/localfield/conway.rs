//! Fixed residue-field moduli.
//!
//! Conway polynomials for the small `(p, f)` in use, low-degree-first with
//! coefficients in `[0, p)`. Their integer lifts define the Galois rings.
//! Anything not in the table falls back to the lexicographically smallest
//! primitive polynomial, which is equally deterministic.

use crate::coeff::fpoly;

const TABLE: &[(u64, usize, &[u64])] = &[
    (2, 1, &[1, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (3, 1, &[1, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (3, 5, &[1, 2, 0, 0, 0, 1]),
    (3, 6, &[2, 2, 1, 0, 2, 0, 1]),
    (5, 1, &[3, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (5, 4, &[2, 4, 4, 0, 1]),
    (7, 1, &[4, 1]),
    (7, 2, &[3, 6, 1]),
    (7, 3, &[4, 0, 6, 1]),
    (11, 1, &[9, 1]),
    (11, 2, &[2, 7, 1]),
    (13, 1, &[11, 1]),
    (13, 2, &[2, 12, 1]),
];

pub(crate) fn table_entry(p: u64, f: usize) -> Option<&'static [u64]> {
    TABLE
        .iter()
        .find(|(tp, tf, _)| *tp == p && *tf == f)
        .map(|(_, _, c)| *c)
}

/// Whether `x` has multiplicative order exactly `p^f - 1` modulo `h`.
fn is_primitive(h: &[u64], p: u64) -> bool {
    let f = h.len() - 1;
    let order = (p as u128).pow(f as u32) - 1;
    let one = vec![1u64];
    if fpoly::poly_powmod(&[0, 1], order, h, p) != fpoly::poly_rem(&one, h, p) {
        return false;
    }
    fpoly::factorize(order as u64).into_iter().all(|(r, _)| {
        fpoly::poly_powmod(&[0, 1], order / r as u128, h, p) != fpoly::poly_rem(&one, h, p)
    })
}

fn lex_smallest_primitive(p: u64, f: usize) -> Vec<u64> {
    let total = (p as u128).pow(f as u32);
    for code in 0..total {
        let mut h = Vec::with_capacity(f + 1);
        let mut c = code;
        for _ in 0..f {
            h.push((c % p as u128) as u64);
            c /= p as u128;
        }
        h.push(1);
        if h[0] != 0 && is_primitive(&h, p) {
            return h;
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

/// Monic modulus of degree `f` over `F_p` defining `F_{p^f}`.
pub(crate) fn modulus(p: u64, f: usize) -> Vec<u64> {
    match table_entry(p, f) {
        Some(c) => c.to_vec(),
        None => lex_smallest_primitive(p, f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_entries_are_primitive() {
        for &(p, f, h) in TABLE {
            assert_eq!(h.len(), f + 1);
            assert!(is_primitive(h, p), "p={p} f={f}");
        }
    }

    #[test]
    fn table_is_conway_compatible() {
        // For d | f, x^{(p^f-1)/(p^d-1)} mod h_f is a root of h_d.
        for &(p, f, h) in TABLE {
            for d in 1..f {
                if f % d != 0 {
                    continue;
                }
                let Some(hd) = table_entry(p, d) else {
                    continue;
                };
                let e = ((p as u128).pow(f as u32) - 1) / ((p as u128).pow(d as u32) - 1);
                let r = fpoly::poly_powmod(&[0, 1], e, h, p);
                let mut acc: Vec<u64> = Vec::new();
                for &c in hd.iter().rev() {
                    acc = fpoly::poly_mulmod(&acc, &r, h, p);
                    acc = fpoly::poly_sub(&acc, &[fpoly::submod(0, c, p)], p);
                }
                assert!(acc.is_empty(), "p={p} f={f} d={d}");
            }
        }
    }

    #[test]
    fn fallback_is_primitive() {
        let h = modulus(17, 2);
        assert!(is_primitive(&h, 17));
        assert_eq!(h.len(), 3);
    }
}
