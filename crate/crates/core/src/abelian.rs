//! Bases and discrete logarithms for small finite abelian groups.
//!
//! A group is handed over as a multiplication on indices `0..n`. The basis
//! is built greedily: at each step take the smallest-index element of
//! largest order modulo the subgroup found so far, and correct it so that
//! it splits off as a direct factor. The orders come out as invariant
//! factors, each dividing the previous one.

use crate::coeff::fpoly::factorize;

#[derive(Debug, Clone)]
pub struct AbelianPresentation {
    order: usize,
    identity: usize,
    gens: Vec<usize>,
    orders: Vec<u64>,
    /// Row-major `order × gens.len()` table of exponents.
    dlog: Vec<u64>,
}

fn pow_idx(mul: &impl Fn(usize, usize) -> usize, identity: usize, x: usize, mut e: u64) -> usize {
    let mut acc = identity;
    let mut b = x;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, b);
        }
        e >>= 1;
        if e > 0 {
            b = mul(b, b);
        }
    }
    acc
}

impl AbelianPresentation {
    /// `mul` must be an abelian group law on `0..n` with identity `identity`.
    pub fn build(n: usize, identity: usize, mul: impl Fn(usize, usize) -> usize) -> Self {
        assert!(n >= 1 && identity < n);
        // coords[i] = exponents of element i once it lies in the current H
        let mut coords: Vec<Option<Vec<u64>>> = vec![None; n];
        coords[identity] = Some(Vec::new());
        let mut members = vec![identity];
        let mut gens: Vec<usize> = Vec::new();
        let mut orders: Vec<u64> = Vec::new();

        while members.len() < n {
            let q = (n / members.len()) as u64;
            let primes: Vec<u64> = factorize(q).into_iter().map(|(r, _)| r).collect();
            let mut best: Option<(u64, usize)> = None;
            for y in 0..n {
                if coords[y].is_some() {
                    continue;
                }
                let mut m = q;
                for &r in &primes {
                    while m.is_multiple_of(r) && coords[pow_idx(&mul, identity, y, m / r)].is_some()
                    {
                        m /= r;
                    }
                }
                if best.is_none_or(|(s, _)| m > s) {
                    best = Some((m, y));
                    if m == q {
                        break;
                    }
                }
            }
            let (s, y) = best.expect("nonempty quotient");
            let h = pow_idx(&mul, identity, y, s);
            let c = coords[h].clone().expect("y^s lies in H");
            let mut y_adj = y;
            for (i, &ci) in c.iter().enumerate() {
                assert!(ci % s == 0, "greedy basis correction must be exact");
                let shift = (orders[i] - ci / s) % orders[i];
                y_adj = mul(y_adj, pow_idx(&mul, identity, gens[i], shift));
            }

            let k = gens.len();
            let mut next = Vec::with_capacity(members.len() * s as usize);
            let mut yj = identity;
            for j in 0..s {
                for &h in &members {
                    let e = mul(h, yj);
                    if j > 0 {
                        let mut v = coords[h].clone().unwrap();
                        v.push(j);
                        debug_assert!(coords[e].is_none());
                        coords[e] = Some(v);
                        next.push(e);
                    }
                }
                yj = mul(yj, y_adj);
            }
            for h in &members {
                coords[*h].as_mut().unwrap().push(0);
            }
            debug_assert!(coords
                .iter()
                .flatten()
                .all(|v| v.len() == k + 1 || v.len() == k));
            members.extend(next);
            gens.push(y_adj);
            orders.push(s);
        }

        let k = gens.len();
        let mut dlog = vec![0u64; n * k];
        for (i, v) in coords.into_iter().enumerate() {
            let v = v.expect("every element is reached");
            dlog[i * k..(i + 1) * k].copy_from_slice(&v);
        }
        AbelianPresentation {
            order: n,
            identity,
            gens,
            orders,
            dlog,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    pub fn gen_orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    /// Exponent vector `e` with `x = Π g_i^{e_i}`, `0 <= e_i < d_i`.
    pub fn dlog(&self, x: usize) -> &[u64] {
        let k = self.gens.len();
        &self.dlog[x * k..(x + 1) * k]
    }

    /// Group exponent, the first invariant factor.
    pub fn exponent(&self) -> u64 {
        self.orders.first().copied().unwrap_or(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn units_mod(m: u64) -> (Vec<u64>, AbelianPresentation) {
        let elems: Vec<u64> = (1..m)
            .filter(|&a| num_integer::Integer::gcd(&a, &m) == 1)
            .collect();
        let idx = |a: u64| elems.iter().position(|&e| e == a).unwrap();
        let pres = AbelianPresentation::build(elems.len(), 0, |i, j| idx(elems[i] * elems[j] % m));
        (elems, pres)
    }

    #[test]
    fn cyclic_unit_group_mod_9() {
        let (elems, pres) = units_mod(9);
        assert_eq!(pres.gen_orders(), &[6]);
        assert_eq!(elems[pres.generators()[0]], 2);
    }

    #[test]
    fn noncyclic_unit_groups() {
        let (_, pres) = units_mod(16);
        assert_eq!(pres.gen_orders(), &[4, 2]);
        let (_, pres) = units_mod(24);
        assert_eq!(pres.gen_orders(), &[2, 2, 2]);
        let (_, pres) = units_mod(63);
        assert_eq!(pres.gen_orders(), &[6, 6]);
    }

    #[test]
    fn dlog_is_a_homomorphism() {
        let m = 80;
        let (elems, pres) = units_mod(m);
        let idx = |a: u64| elems.iter().position(|&e| e == a).unwrap();
        for i in 0..elems.len() {
            for j in 0..elems.len() {
                let prod = idx(elems[i] * elems[j] % m);
                for (t, &d) in pres.gen_orders().iter().enumerate() {
                    assert_eq!((pres.dlog(i)[t] + pres.dlog(j)[t]) % d, pres.dlog(prod)[t]);
                }
            }
        }
    }

    #[test]
    fn trivial_group() {
        let pres = AbelianPresentation::build(1, 0, |_, _| 0);
        assert_eq!(pres.rank(), 0);
        assert_eq!(pres.exponent(), 1);
        assert!(pres.dlog(0).is_empty());
    }
}
