//! Reduction maps `ℤ[1/p][ζ_N] → F_{l^d}` for primes `l ≠ p`, and `ε₀`
//! recomputed with coefficients in `F_{l^d}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chars::{AddChar, HaarMeasure, MulChar};
use crate::coeff::fpoly;
use crate::coeff::{CoeffError, CycNum, FinField, FinFieldElem};
use crate::epsilon::{gamma_valuation, gauss_data, EpsilonError};

/// Seed of the equal-degree splitting; any seed gives the same factors.
const SPLIT_SEED: u64 = 0x05EE_D0FF_1E1D;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("l = {0} equals the residue characteristic")]
    SameCharacteristic(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("level {value} does not divide the reduction level {map}")]
    LevelMismatch { value: u64, map: u64 },
    #[error("prime mismatch: value over p={value}, map over p={map}")]
    PrimeMismatch { value: u64, map: u64 },
    #[error("modulus is not an irreducible factor of Phi_{0} mod l")]
    BadModulus(u64),
    #[error("reduced epsilon factor vanishes")]
    ZeroReduction,
    #[error(transparent)]
    Epsilon(#[from] EpsilonError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// `ζ_N ↦ x` in `F_l[x]/(g)`, `g` an irreducible factor of `Φ_N mod l`.
#[derive(Debug, Clone)]
pub struct ReductionMap {
    n: u64,
    p: u64,
    l: u64,
    field: Arc<FinField>,
    /// Images of `ζ_N^j`, `0 <= j < N`.
    powers: Vec<FinFieldElem>,
    p_inv: FinFieldElem,
}

fn reduce_poly(poly: &[i64], l: u64) -> Vec<u64> {
    let mut v: Vec<u64> = poly.iter().map(|&c| fpoly::reduce_i64(c, l)).collect();
    fpoly::trim(&mut v);
    v
}

fn prime_to(mut n: u64, l: u64) -> u64 {
    while n.is_multiple_of(l) {
        n /= l;
    }
    n
}

/// `a^{1 + l + … + l^{d-1}} mod f`.
fn norm_power(a: &[u64], d: usize, f: &[u64], l: u64) -> Vec<u64> {
    let mut acc = vec![1];
    let mut conj = a.to_vec();
    for _ in 0..d {
        acc = fpoly::poly_mulmod(&acc, &conj, f, l);
        conj = fpoly::poly_powmod(&conj, l as u128, f, l);
    }
    acc
}

/// `a + a^2 + … + a^{2^{d-1}} mod f` over `F_2`.
fn trace_power(a: &[u64], d: usize, f: &[u64]) -> Vec<u64> {
    let mut acc = Vec::new();
    let mut t = a.to_vec();
    for _ in 0..d {
        acc = fpoly::poly_sub(&acc, &t, 2);
        t = fpoly::poly_mulmod(&t, &t, f, 2);
    }
    acc
}

/// Cantor–Zassenhaus splitting of `f`, a product of distinct degree-`d`
/// irreducibles.
fn equal_degree(f: &[u64], d: usize, l: u64, rng: &mut ChaCha8Rng) -> Vec<Vec<u64>> {
    let k = fpoly::degree(f).unwrap_or(0);
    if k <= d {
        return vec![f.to_vec()];
    }
    loop {
        let a: Vec<u64> = (0..k).map(|_| rng.gen_range(0..l)).collect();
        let mut a = a;
        fpoly::trim(&mut a);
        if fpoly::degree(&a).unwrap_or(0) == 0 {
            continue;
        }
        let b = if l == 2 {
            trace_power(&a, d, f)
        } else {
            let n = norm_power(&a, d, f, l);
            let h = fpoly::poly_powmod(&n, ((l - 1) / 2) as u128, f, l);
            fpoly::poly_sub(&h, &[1], l)
        };
        let g = fpoly::poly_monic(&fpoly::poly_gcd(&b, f, l), l);
        let dg = fpoly::degree(&g).unwrap_or(0);
        if dg > 0 && dg < k {
            let other = fpoly::poly_monic(&fpoly::poly_divrem(f, &g, l).0, l);
            let mut out = equal_degree(&g, d, l, rng);
            out.extend(equal_degree(&other, d, l, rng));
            return out;
        }
    }
}

/// Multiplicative order of `l` modulo `n`, `gcd(l, n) = 1`.
fn order_mod(l: u64, n: u64) -> usize {
    let mut x = 1 % n;
    let mut d = 0;
    loop {
        x = fpoly::mulmod(x, l, n);
        d += 1;
        if x == 1 % n {
            return d;
        }
    }
}

/// All monic irreducible factors of `Φ_N mod l`, `l ∤ N`, sorted. They all
/// have degree equal to the order of `l` mod `N`.
pub fn cyclotomic_factors(n: u64, l: u64) -> Vec<Vec<u64>> {
    let phi = reduce_poly(&crate::coeff::cyclo::get(n).poly, l);
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut out = equal_degree(&phi, order_mod(l, n), l, &mut rng);
    out.sort();
    out
}

type FactorCache = Mutex<HashMap<(u64, u64), Vec<u64>>>;

static FACTORS: OnceLock<FactorCache> = OnceLock::new();

/// Lexicographically smallest factor (low-degree-first coefficients),
/// memoized per `(N, l)`.
fn smallest_factor(n: u64, l: u64) -> Vec<u64> {
    let cache = FACTORS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(g) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&(n, l)) {
        return g.clone();
    }
    let g = cyclotomic_factors(n, l).swap_remove(0);
    cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .entry((n, l))
        .or_insert(g)
        .clone()
}

impl ReductionMap {
    /// The map through the lexicographically smallest factor of `Φ_N mod l`.
    pub fn new(n: u64, p: u64, l: u64) -> Result<Self, ReduceError> {
        Self::check_primes(p, l)?;
        let g = smallest_factor(prime_to(n, l), l);
        Self::build(n, p, l, g)
    }

    /// The map through a prescribed factor `g` (low-degree-first, monic).
    pub fn with_modulus(n: u64, p: u64, l: u64, modulus: &[u64]) -> Result<Self, ReduceError> {
        Self::check_primes(p, l)?;
        let mut g: Vec<u64> = modulus.iter().map(|c| c % l).collect();
        fpoly::trim(&mut g);
        let phi = reduce_poly(&crate::coeff::cyclo::get(prime_to(n, l)).poly, l);
        let divides = fpoly::degree(&g).is_some_and(|d| d > 0 && g[d] == 1)
            && fpoly::poly_rem(&phi, &g, l).is_empty();
        if !divides || !crate::coeff::finfield::is_irreducible(&g, l) {
            return Err(ReduceError::BadModulus(n));
        }
        Self::build(n, p, l, g)
    }

    fn check_primes(p: u64, l: u64) -> Result<(), ReduceError> {
        if !fpoly::is_prime(l) {
            return Err(ReduceError::NotPrime(l));
        }
        if l == p {
            return Err(ReduceError::SameCharacteristic(l));
        }
        Ok(())
    }

    fn build(n: u64, p: u64, l: u64, g: Vec<u64>) -> Result<Self, ReduceError> {
        let field = FinField::new_unchecked(l, g);
        let x = FinFieldElem::generator(&field);
        let mut powers = Vec::with_capacity(n as usize);
        let mut cur = FinFieldElem::one(&field);
        for _ in 0..n {
            powers.push(cur.clone());
            cur = cur.mul(&x)?;
        }
        debug_assert_eq!(cur, FinFieldElem::one(&field));
        let p_inv = FinFieldElem::from_int(&field, p as i64).inv()?;
        Ok(ReductionMap {
            n,
            p,
            l,
            field,
            powers,
            p_inv,
        })
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub fn modulus(&self) -> &[u64] {
        self.field.modulus()
    }

    pub fn field(&self) -> &Arc<FinField> {
        &self.field
    }

    /// Image of `ζ_N^j`.
    pub fn zeta_power(&self, j: i64) -> &FinFieldElem {
        &self.powers[j.rem_euclid(self.n as i64) as usize]
    }

    fn big_mod(&self, c: &BigInt) -> u64 {
        let l = BigInt::from(self.l);
        let r = ((c % &l) + &l) % &l;
        r.to_u64().expect("residue below l")
    }

    /// Ring homomorphism on values whose level divides `N`.
    pub fn reduce_cyc(&self, a: &CycNum) -> Result<FinFieldElem, ReduceError> {
        if a.p() != self.p {
            return Err(ReduceError::PrimeMismatch {
                value: a.p(),
                map: self.p,
            });
        }
        if !self.n.is_multiple_of(a.level()) {
            return Err(ReduceError::LevelMismatch {
                value: a.level(),
                map: self.n,
            });
        }
        let step = (self.n / a.level()) as i64;
        let mut acc = FinFieldElem::zero(&self.field);
        for (i, c) in a.numerators().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&self.zeta_power(i as i64 * step).scale(self.big_mod(c)))?;
        }
        Ok(acc.mul(&self.p_inv.pow(a.den_exp() as u128))?)
    }
}

/// Smallest level carrying every value in the Gauss sum of `(χ, ψ, dx)`:
/// its roots of unity, `χ(π)` and `∫_𝒪 dx`.
pub fn gauss_level(chi: &MulChar, psi: &AddChar, dx: &HaarMeasure) -> Result<u64, ReduceError> {
    let n = gauss_data(chi, psi, dx, None)?.level;
    Ok(n.lcm(&chi.pi_value().level()).lcm(&dx.volume().level()))
}

/// `ε₀` with every root of unity, the measure and `χ(π)` pushed through
/// `r` before summation.
pub fn epsilon0_mod_l(
    chi: &MulChar,
    psi: &AddChar,
    dx: &HaarMeasure,
    r: &ReductionMap,
) -> Result<FinFieldElem, ReduceError> {
    let data = gauss_data(chi, psi, dx, None)?;
    if !r.n.is_multiple_of(data.level) {
        return Err(ReduceError::LevelMismatch {
            value: data.level,
            map: r.n,
        });
    }
    let step = (r.n / data.level) as i64;
    let mut sum = FinFieldElem::zero(&r.field);
    for (e, &c) in data.counts.iter().enumerate() {
        if c != 0 {
            let k = fpoly::reduce_i64(c, r.l);
            sum = sum.add(&r.zeta_power(e as i64 * step).scale(k))?;
        }
    }
    let field = chi.field();
    let v = gamma_valuation(chi, psi);
    let m = chi.conductor().max(1) as i64;
    let q = FinFieldElem::from_int(r.field(), field.q() as i64 % r.l as i64);
    let q_pow = if v >= m {
        q.pow((v - m) as u128)
    } else {
        q.inv()?.pow((m - v) as u128)
    };
    let pi_val = r.reduce_cyc(chi.pi_value())?;
    let pi_pow = if v >= 0 {
        pi_val.pow(v as u128)
    } else {
        pi_val.inv()?.pow((-v) as u128)
    };
    let vol = r.reduce_cyc(dx.volume())?;
    let out = sum.mul(&q_pow)?.mul(&vol)?.mul(&pi_pow)?;
    if out.is_zero() {
        return Err(ReduceError::ZeroReduction);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::addchar_standard;
    use crate::epsilon::epsilon0_char;
    use crate::localfield::LocalFieldSpec;

    fn poly_product(fs: &[Vec<u64>], l: u64) -> Vec<u64> {
        fs.iter()
            .fold(vec![1], |acc, f| fpoly::poly_mul(&acc, f, l))
    }

    fn mult_order(l: u64, n: u64) -> usize {
        (1..=n as usize)
            .find(|&k| fpoly::powmod(l % n, k as u64, n) == 1 % n)
            .unwrap()
    }

    #[test]
    fn phi3_mod_7_and_mod_2() {
        let r = ReductionMap::new(3, 3, 7).unwrap();
        assert_eq!((r.degree(), r.modulus()), (1, &[3u64, 1][..]));
        assert_eq!(r.zeta_power(1).coords(), vec![4]);
        let a = &CycNum::one(3) + &CycNum::root_of_unity(3, 1, 3).scale_int(&BigInt::from(2));
        assert_eq!(r.reduce_cyc(&a).unwrap().coords(), vec![2]);
        let r2 = ReductionMap::with_modulus(3, 3, 7, &[5, 1]).unwrap();
        assert_eq!(r2.reduce_cyc(&a).unwrap().coords(), vec![5]);
        let r3 = ReductionMap::new(3, 5, 2).unwrap();
        assert_eq!(r3.degree(), 2);
        assert!(ReductionMap::with_modulus(3, 3, 7, &[1, 1]).is_err());
    }

    #[test]
    fn level_one_and_errors() {
        let r = ReductionMap::new(1, 3, 5).unwrap();
        assert_eq!(r.degree(), 1);
        assert_eq!(
            r.reduce_cyc(&CycNum::from_int(3, 7)).unwrap().coords(),
            vec![2]
        );
        assert_eq!(
            r.reduce_cyc(&CycNum::one(3)).unwrap(),
            FinFieldElem::one(r.field())
        );
        // 1/3 ↦ 2 in F_5
        assert_eq!(
            r.reduce_cyc(&CycNum::p_power(3, -1)).unwrap().coords(),
            vec![2]
        );
        assert_eq!(
            ReductionMap::new(4, 3, 3).unwrap_err(),
            ReduceError::SameCharacteristic(3)
        );
        assert_eq!(
            ReductionMap::new(4, 3, 9).unwrap_err(),
            ReduceError::NotPrime(9)
        );
        let z9 = CycNum::root_of_unity(9, 1, 3);
        assert!(matches!(
            r.reduce_cyc(&z9),
            Err(ReduceError::LevelMismatch { .. })
        ));
    }

    #[test]
    fn factorizations_are_complete() {
        for n in [1u64, 3, 4, 5, 8, 9, 12, 15, 20, 21, 24, 36, 63, 80, 100] {
            for l in [2u64, 3, 5, 7, 11, 13] {
                if n % l == 0 {
                    continue;
                }
                let fs = cyclotomic_factors(n, l);
                let phi = reduce_poly(&crate::coeff::cyclo::get(n).poly, l);
                assert_eq!(poly_product(&fs, l), phi, "N={n} l={l}");
                let d = mult_order(l, n);
                for f in &fs {
                    assert_eq!(fpoly::degree(f), Some(d));
                    assert!(crate::coeff::finfield::is_irreducible(f, l));
                }
                assert_eq!(fs, cyclotomic_factors(n, l));
            }
        }
    }

    #[test]
    fn divisible_level() {
        // ζ_6 ↦ a primitive cube root of unity in F_4
        let r = ReductionMap::new(6, 3, 2).unwrap();
        assert_eq!(r.degree(), 2);
        assert_eq!(*r.zeta_power(3), FinFieldElem::one(r.field()));
        assert_ne!(*r.zeta_power(1), FinFieldElem::one(r.field()));
    }

    #[test]
    fn homomorphism() {
        let r = ReductionMap::new(36, 5, 13).unwrap();
        let xs: Vec<CycNum> = (0..12)
            .map(|k| {
                let a = CycNum::root_of_unity(36, k, 5).scale_int(&BigInt::from(k + 2));
                &(&a + &CycNum::root_of_unity(12, 5 * k + 1, 5)) * &CycNum::p_power(5, -k % 3)
            })
            .collect();
        for a in &xs {
            for b in &xs {
                let lhs = r.reduce_cyc(&(a * b)).unwrap();
                let rhs = r
                    .reduce_cyc(a)
                    .unwrap()
                    .mul(&r.reduce_cyc(b).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
                let sum = r.reduce_cyc(&(a + b)).unwrap();
                assert_eq!(
                    sum,
                    r.reduce_cyc(a)
                        .unwrap()
                        .add(&r.reduce_cyc(b).unwrap())
                        .unwrap()
                );
            }
        }
    }

    #[test]
    fn epsilon_examples_mod_7() {
        let k = LocalFieldSpec::padic(3, 1).unwrap();
        let psi = addchar_standard(k).unwrap();
        let dx = HaarMeasure::standard(k);
        let r = ReductionMap::new(3, 3, 7).unwrap();
        let triv = MulChar::trivial(k);
        assert_eq!(
            epsilon0_mod_l(&triv, &psi, &dx, &r).unwrap().coords(),
            vec![6]
        );
        let quad = MulChar::new(k, 1, CycNum::one(3), vec![1]).unwrap();
        let r2 = ReductionMap::with_modulus(6, 3, 7, &[5, 1]).unwrap_err();
        assert_eq!(r2, ReduceError::BadModulus(6));
        let n = gauss_level(&quad, &psi, &dx).unwrap();
        assert_eq!(n, 6);
        let r6 = ReductionMap::with_modulus(6, 3, 7, &[4, 1]).unwrap();
        // ζ_6 ↦ 3, so ζ_3 = ζ_6^2 ↦ 2
        assert_eq!(r6.zeta_power(2).coords(), vec![2]);
        assert_eq!(
            epsilon0_mod_l(&quad, &psi, &dx, &r6).unwrap().coords(),
            vec![5]
        );
    }

    #[test]
    fn commutes_with_reduction() {
        for k in [
            LocalFieldSpec::padic(5, 1).unwrap(),
            LocalFieldSpec::laurent(2, 2).unwrap(),
        ] {
            let psi = addchar_standard(k).unwrap();
            let dx = HaarMeasure::new(CycNum::p_power(k.p(), -1)).unwrap();
            for chi in
                MulChar::family(k, 2, &CycNum::root_of_unity(4, 1, k.p()), false, 100).unwrap()
            {
                let n = gauss_level(&chi, &psi, &dx).unwrap();
                let e = epsilon0_char(&chi, &psi, &dx).unwrap();
                for l in [2u64, 3, 5, 7, 11, 13] {
                    if l == k.p() {
                        continue;
                    }
                    let r = ReductionMap::new(n, k.p(), l).unwrap();
                    assert_eq!(
                        epsilon0_mod_l(&chi, &psi, &dx, &r).unwrap(),
                        r.reduce_cyc(&e).unwrap()
                    );
                }
            }
        }
    }
}
