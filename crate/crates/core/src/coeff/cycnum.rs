use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::cyclo::{self, Cyclo};
use super::fpoly;
use super::CoeffError;

/// An element of `ℤ[1/p][ζ_N]`.
///
/// The value is `(Σ num[i] ζ_N^i) / p^den_exp` with `num` of length `φ(N)`,
/// reduced modulo `Φ_N`. The representation is canonical at a fixed level:
/// `den_exp` is zero or some numerator coefficient is prime to `p`.
/// Values at different levels compare equal when they agree after lifting
/// to the lcm level. Arithmetic never lowers the level; [`CycNum::descend`]
/// finds the smallest one.
#[derive(Clone, Debug)]
pub struct CycNum {
    level: u64,
    p: u64,
    num: Vec<BigInt>,
    den_exp: u32,
}

/// `p`-adic valuation of a nonzero integer when it is `± p^k`.
fn pure_power(x: &BigInt, p: u64) -> Option<u32> {
    let mut x = x.abs();
    let p = BigInt::from(p);
    let mut k = 0;
    while x > BigInt::one() {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return None;
        }
        x = q;
        k += 1;
    }
    if x.is_one() {
        Some(k)
    } else {
        None
    }
}

fn pow_p(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

fn bits_of(v: &[BigInt]) -> u64 {
    v.iter().map(|c| c.bits()).max().unwrap_or(0)
}

fn reduce_folded_big(c: &Cyclo, acc: Vec<BigInt>) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); c.phi];
    for (j, v) in acc.into_iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        for &(i, k) in &c.powers[j] {
            out[i] += &v * k;
        }
    }
    out
}

fn reduce_folded_small(c: &Cyclo, acc: &[i128]) -> Vec<BigInt> {
    let mut out = vec![0i128; c.phi];
    for (j, &v) in acc.iter().enumerate() {
        if v == 0 {
            continue;
        }
        for &(i, k) in &c.powers[j] {
            out[i] += v * k as i128;
        }
    }
    out.into_iter().map(BigInt::from).collect()
}

/// Product of two reduced coefficient vectors at the same level.
fn mul_reduced(c: &Cyclo, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = c.n as usize;
    let max_pow = c
        .powers
        .iter()
        .flat_map(|v| v.iter().map(|&(_, k)| k.unsigned_abs()))
        .max()
        .unwrap_or(1);
    let overhead =
        2 * (64 - (n as u64).leading_zeros() as u64) + (64 - max_pow.leading_zeros() as u64) + 2;
    if bits_of(a) + bits_of(b) + overhead < 126 {
        let a: Vec<i128> = a.iter().map(|x| x.to_i128().unwrap()).collect();
        let b: Vec<i128> = b.iter().map(|x| x.to_i128().unwrap()).collect();
        let mut acc = vec![0i128; n];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                acc[(i + j) % n] += x * y;
            }
        }
        reduce_folded_small(c, &acc)
    } else {
        let mut acc = vec![BigInt::zero(); n];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                acc[(i + j) % n] += x * y;
            }
        }
        reduce_folded_big(c, acc)
    }
}

/// Incremental Chinese remaindering of a vector of residues.
struct Crt {
    modulus: BigInt,
    values: Vec<BigInt>,
}

impl Crt {
    fn new(len: usize) -> Self {
        Crt {
            modulus: BigInt::one(),
            values: vec![BigInt::zero(); len],
        }
    }

    fn push(&mut self, l: u64, residues: &[u64]) {
        let m_mod = (&self.modulus % l).to_u64().unwrap();
        let inv = fpoly::invmod(m_mod, l);
        for (v, &s) in self.values.iter_mut().zip(residues) {
            let cur = (&*v % l).to_u64().unwrap();
            let t = fpoly::mulmod(fpoly::submod(s, cur, l), inv, l);
            *v += &self.modulus * t;
        }
        self.modulus *= l;
    }

    fn symmetric(&self) -> Vec<BigInt> {
        let half = &self.modulus >> 1;
        self.values
            .iter()
            .map(|v| {
                if v > &half {
                    v - &self.modulus
                } else {
                    v.clone()
                }
            })
            .collect()
    }
}

fn residues(v: &[BigInt], l: u64) -> Vec<u64> {
    v.iter()
        .map(|c| {
            let r = c.mod_floor(&BigInt::from(l));
            r.to_u64().unwrap()
        })
        .collect()
}

fn phi_mod(c: &Cyclo, l: u64) -> Vec<u64> {
    c.poly.iter().map(|&k| fpoly::reduce_i64(k, l)).collect()
}

/// `Res(Φ_N, A) = Π_σ σ(A)` over ℤ, by multimodular reconstruction with the
/// bound `|Res| <= ||A||_1^φ`.
fn resultant_exact(c: &Cyclo, a: &[BigInt]) -> BigInt {
    let l1: BigInt = a.iter().map(|x| x.abs()).sum();
    if l1.is_zero() {
        return BigInt::zero();
    }
    let bound_bits = c.phi as u64 * l1.bits() + 2;
    let mut crt = Crt::new(1);
    let mut i = 0;
    while crt.modulus.bits() <= bound_bits {
        let l = fpoly::crt_prime(i);
        i += 1;
        let phi = phi_mod(c, l);
        let ar = residues(a, l);
        let r = fpoly::resultant(&phi, &ar, l);
        crt.push(l, &[r]);
    }
    crt.symmetric().pop().unwrap()
}

impl CycNum {
    fn canonical(level: u64, p: u64, mut num: Vec<BigInt>, mut den_exp: u32) -> CycNum {
        if num.iter().all(|c| c.is_zero()) {
            den_exp = 0;
        } else {
            let pb = BigInt::from(p);
            while den_exp > 0 && num.iter().all(|c| c.is_multiple_of(&pb)) {
                for c in num.iter_mut() {
                    *c = &*c / &pb;
                }
                den_exp -= 1;
            }
        }
        CycNum {
            level,
            p,
            num,
            den_exp,
        }
    }

    pub fn zero(level: u64, p: u64) -> CycNum {
        let phi = cyclo::get(level).phi;
        CycNum {
            level,
            p,
            num: vec![BigInt::zero(); phi],
            den_exp: 0,
        }
    }

    pub fn one(p: u64) -> CycNum {
        CycNum::from_int(p, 1)
    }

    pub fn from_int(p: u64, v: i64) -> CycNum {
        CycNum {
            level: 1,
            p,
            num: vec![BigInt::from(v)],
            den_exp: 0,
        }
    }

    /// `p^k` for any integer `k`.
    pub fn p_power(p: u64, k: i64) -> CycNum {
        if k >= 0 {
            CycNum::canonical(1, p, vec![pow_p(p, k as u32)], 0)
        } else {
            CycNum::canonical(1, p, vec![BigInt::one()], (-k) as u32)
        }
    }

    pub fn from_rational(p: u64, r: &BigRational) -> Result<CycNum, CoeffError> {
        CycNum::from_rational_coeffs(1, p, std::slice::from_ref(r))
    }

    /// Build from rational power-basis coordinates; every denominator must be
    /// a power of `p`.
    pub fn from_rational_coeffs(
        level: u64,
        p: u64,
        coeffs: &[BigRational],
    ) -> Result<CycNum, CoeffError> {
        if level == 0 {
            return Err(CoeffError::ZeroLevel);
        }
        let phi = cyclo::get(level).phi;
        if coeffs.len() != phi {
            return Err(CoeffError::WrongLength {
                level,
                expected: phi,
                got: coeffs.len(),
            });
        }
        let mut exps = Vec::with_capacity(phi);
        for c in coeffs {
            let k = pure_power(c.denom(), p).ok_or_else(|| CoeffError::BadDenominator {
                den: c.denom().to_string(),
                p,
            })?;
            exps.push(k);
        }
        let top = exps.iter().copied().max().unwrap_or(0);
        let num = coeffs
            .iter()
            .zip(&exps)
            .map(|(c, &k)| c.numer() * pow_p(p, top - k))
            .collect();
        Ok(CycNum::canonical(level, p, num, top))
    }

    /// `ζ_order^exponent`, at level `order`.
    pub fn root_of_unity(order: u64, exponent: i64, p: u64) -> CycNum {
        let c = cyclo::get(order);
        let j = exponent.rem_euclid(order as i64) as usize;
        let mut num = vec![BigInt::zero(); c.phi];
        for &(i, k) in &c.powers[j] {
            num[i] = BigInt::from(k);
        }
        CycNum {
            level: order,
            p,
            num,
            den_exp: 0,
        }
    }

    /// `Σ_j counts[j] ζ_level^j`; `counts.len()` must equal `level`.
    pub fn from_counts(level: u64, p: u64, counts: &[i64]) -> CycNum {
        let c = cyclo::get(level);
        assert_eq!(counts.len() as u64, level);
        let acc: Vec<i128> = counts.iter().map(|&x| x as i128).collect();
        CycNum::canonical(level, p, reduce_folded_small(&c, &acc), 0)
    }

    /// Parse a sum of terms `c`, `c*zN`, `zN^k`, `-c*zN^k`, with `c` an
    /// integer or `n/d` (`d` a power of `p`). Accepts the `Display` form.
    pub fn parse(p: u64, s: &str) -> Result<CycNum, CoeffError> {
        let err = || CoeffError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err());
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in t.char_indices() {
            if (ch == '+' || ch == '-') && i > start {
                terms.push(&t[start..i]);
                start = i;
            }
        }
        terms.push(&t[start..]);
        let mut acc = CycNum::zero(1, p);
        for term in terms {
            let (neg, body) = match term.as_bytes().first() {
                Some(b'-') => (true, &term[1..]),
                Some(b'+') => (false, &term[1..]),
                _ => (false, term),
            };
            if body.is_empty() {
                return Err(err());
            }
            let (coef, root) = match body.find('z') {
                Some(i) => {
                    let c = body[..i].strip_suffix('*').unwrap_or(&body[..i]);
                    if c.is_empty() && i > 0 {
                        return Err(err());
                    }
                    (c, Some(&body[i + 1..]))
                }
                None => (body, None),
            };
            let mut c = if coef.is_empty() {
                BigRational::one()
            } else {
                parse_rational(coef).map_err(|_| err())?
            };
            if neg {
                c = -c;
            }
            let mut x = CycNum::from_rational(p, &c).map_err(|_| err())?;
            if let Some(r) = root {
                let (n, k) = r.split_once('^').unwrap_or((r, "1"));
                let n: u64 = n.parse().map_err(|_| err())?;
                let k: i64 = k.parse().map_err(|_| err())?;
                if n == 0 {
                    return Err(err());
                }
                x = x.try_mul(&CycNum::root_of_unity(n, k, p))?;
            }
            acc = acc.try_add(&x)?;
        }
        Ok(acc.descend())
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Exponent of `p` in the common denominator.
    pub fn den_exp(&self) -> u32 {
        self.den_exp
    }

    /// Integer numerator coordinates; the value is these over `p^den_exp`.
    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        let den = pow_p(self.p, self.den_exp);
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    /// The rational value, if the element lies in `ℤ[1/p]`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num.iter().skip(1).any(|c| !c.is_zero()) {
            return None;
        }
        Some(BigRational::new(
            self.num[0].clone(),
            pow_p(self.p, self.den_exp),
        ))
    }

    /// Re-express at a level that is a multiple of the current one.
    pub fn lift_to(&self, level: u64) -> Result<CycNum, CoeffError> {
        if level == 0 || !level.is_multiple_of(self.level) {
            return Err(CoeffError::LevelMismatch {
                from: self.level,
                to: level,
            });
        }
        if level == self.level {
            return Ok(self.clone());
        }
        let c = cyclo::get(level);
        let step = (level / self.level) as usize;
        let mut acc = vec![BigInt::zero(); level as usize];
        for (i, v) in self.num.iter().enumerate() {
            acc[i * step] = v.clone();
        }
        Ok(CycNum::canonical(
            level,
            self.p,
            reduce_folded_big(&c, acc),
            self.den_exp,
        ))
    }

    fn harmonize(&self, other: &CycNum) -> Result<(CycNum, CycNum), CoeffError> {
        if self.p != other.p {
            return Err(CoeffError::PrimeMismatch(self.p, other.p));
        }
        let l = self.level.lcm(&other.level);
        Ok((self.lift_to(l)?, other.lift_to(l)?))
    }

    pub fn try_add(&self, other: &CycNum) -> Result<CycNum, CoeffError> {
        let (a, b) = self.harmonize(other)?;
        let top = a.den_exp.max(b.den_exp);
        let sa = pow_p(a.p, top - a.den_exp);
        let sb = pow_p(b.p, top - b.den_exp);
        let num = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| x * &sa + y * &sb)
            .collect();
        Ok(CycNum::canonical(a.level, a.p, num, top))
    }

    pub fn try_sub(&self, other: &CycNum) -> Result<CycNum, CoeffError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &CycNum) -> Result<CycNum, CoeffError> {
        let (a, b) = self.harmonize(other)?;
        let c = cyclo::get(a.level);
        let num = mul_reduced(&c, &a.num, &b.num);
        Ok(CycNum::canonical(a.level, a.p, num, a.den_exp + b.den_exp))
    }

    pub fn scale_int(&self, k: &BigInt) -> CycNum {
        let num = self.num.iter().map(|c| c * k).collect();
        CycNum::canonical(self.level, self.p, num, self.den_exp)
    }

    pub fn pow(&self, k: i64) -> Result<CycNum, CoeffError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = CycNum::one(self.p).lift_to(self.level)?;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// The Galois conjugate `ζ ↦ ζ^k`; `k` must be prime to the level.
    pub fn conjugate(&self, k: u64) -> CycNum {
        assert_eq!(k.gcd(&self.level), 1, "conjugation exponent must be a unit");
        let c = cyclo::get(self.level);
        let n = self.level as usize;
        let mut acc = vec![BigInt::zero(); n];
        for (i, v) in self.num.iter().enumerate() {
            acc[(i * k as usize) % n] += v;
        }
        CycNum::canonical(self.level, self.p, reduce_folded_big(&c, acc), self.den_exp)
    }

    /// Field norm from `ℚ(ζ_N)` to `ℚ`.
    ///
    /// Normalization: with `A(x)` the reduced numerator polynomial,
    /// `norm = Res(Φ_N, A) / p^{den_exp·φ(N)}` where `Res(Φ_N, A)` is taken
    /// with the monic `Φ_N` first, so it equals `Π A(ζ)` over the primitive
    /// `N`-th roots `ζ`, with no extra sign.
    pub fn norm(&self) -> BigRational {
        let c = cyclo::get(self.level);
        let res = resultant_exact(&c, &self.num);
        BigRational::new(res, pow_p(self.p, self.den_exp * c.phi as u32))
    }

    /// Membership in `ℤ[1/p][ζ_N]^×`: the norm is `± p^k` for some `k ∈ ℤ`.
    pub fn is_unit(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let n = self.norm();
        pure_power(n.numer(), self.p).is_some() && pure_power(n.denom(), self.p).is_some()
    }

    /// Multiplicative inverse in `ℤ[1/p][ζ_N]`.
    ///
    /// For a unit `a = A / p^k` the adjugate `B = Res(Φ_N, A) · A^{-1}` has
    /// integer coordinates. It is reconstructed from its images modulo
    /// word-sized primes and accepted once `A·B = Res(Φ_N, A)` holds exactly.
    pub fn inverse(&self) -> Result<CycNum, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::NotUnit(self.p));
        }
        let c = cyclo::get(self.level);
        let nonzero: Vec<usize> = (0..c.phi).filter(|&i| !self.num[i].is_zero()).collect();
        if nonzero.len() == 1 {
            let i = nonzero[0];
            let coef = &self.num[i];
            let k = pure_power(coef, self.p).ok_or(CoeffError::NotUnit(self.p))?;
            let root = CycNum::root_of_unity(self.level, -(i as i64), self.p);
            let sign = if coef.is_negative() { -1 } else { 1 };
            let scale = CycNum::p_power(self.p, self.den_exp as i64 - k as i64);
            return Ok(&(&root * &scale) * &CycNum::from_int(self.p, sign));
        }
        let nm = resultant_exact(&c, &self.num);
        let j = pure_power(&nm, self.p).ok_or(CoeffError::NotUnit(self.p))?;
        let mut target = vec![BigInt::zero(); c.phi];
        target[0] = nm.clone();

        let mut crt = Crt::new(c.phi);
        let mut used = 0usize;
        let mut checkpoint = 1usize;
        loop {
            let l = fpoly::crt_prime(used);
            used += 1;
            let phi = phi_mod(&c, l);
            let a = residues(&self.num, l);
            let inv = fpoly::poly_invmod(&a, &phi, l).ok_or(CoeffError::NotUnit(self.p))?;
            let nm_l = residues(std::slice::from_ref(&nm), l)[0];
            let mut b: Vec<u64> = (0..c.phi)
                .map(|i| fpoly::mulmod(inv.get(i).copied().unwrap_or(0), nm_l, l))
                .collect();
            b.resize(c.phi, 0);
            crt.push(l, &b);
            if used == checkpoint {
                let cand = crt.symmetric();
                if mul_reduced(&c, &self.num, &cand) == target {
                    // a^{-1} = p^k B / nm with nm = ±p^j
                    let sign = if nm.is_negative() {
                        BigInt::from(-1)
                    } else {
                        BigInt::one()
                    };
                    let (k, j) = (self.den_exp as i64, j as i64);
                    let num: Vec<BigInt> = if k >= j {
                        let s = pow_p(self.p, (k - j) as u32) * &sign;
                        cand.iter().map(|x| x * &s).collect()
                    } else {
                        cand.iter().map(|x| x * &sign).collect()
                    };
                    let den = (j - k).max(0) as u32;
                    return Ok(CycNum::canonical(self.level, self.p, num, den));
                }
                checkpoint *= 2;
                assert!(
                    checkpoint < 1 << 16,
                    "adjugate reconstruction did not converge"
                );
            }
        }
    }

    pub fn try_div(&self, other: &CycNum) -> Result<CycNum, CoeffError> {
        self.try_mul(&other.inverse()?)
    }

    /// The same value at the smallest level `d` with `x ∈ ℚ(ζ_d)`.
    pub fn descend(&self) -> CycNum {
        let mut cur = self.clone();
        'outer: while cur.level > 1 {
            for (r, _) in fpoly::factorize(cur.level) {
                if let Some(next) = cur.descend_by(r) {
                    cur = next;
                    continue 'outer;
                }
            }
            break;
        }
        cur
    }

    /// Try to rewrite at level `N/r` for a prime `r | N`.
    fn descend_by(&self, r: u64) -> Option<CycNum> {
        let n = self.level;
        let d = n / r;
        let cd = cyclo::get(d);
        if d.is_multiple_of(r) {
            let ru = r as usize;
            if self
                .num
                .iter()
                .enumerate()
                .any(|(i, c)| i % ru != 0 && !c.is_zero())
            {
                return None;
            }
            let num = (0..cd.phi).map(|j| self.num[j * ru].clone()).collect();
            return Some(CycNum::canonical(d, self.p, num, self.den_exp));
        }
        // ζ_N = ζ_d^s ζ_r^t with s r + t d = 1, ζ_d = ζ_N^r, ζ_r = ζ_N^d.
        let (di, ri) = (d as i128, r as i128);
        let e = di.extended_gcd(&ri);
        let (t, s) = (e.x.rem_euclid(ri), e.y.rem_euclid(di));
        let mut ys = vec![vec![BigInt::zero(); d as usize]; r as usize];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let i = i as i128;
            ys[((t * i) % ri) as usize][((s * i) % di) as usize] += c;
        }
        let ys: Vec<Vec<BigInt>> = ys.into_iter().map(|y| reduce_folded_big(&cd, y)).collect();
        let last = &ys[r as usize - 1];
        if ys[1..r as usize - 1].iter().any(|y| y != last) {
            return None;
        }
        let num = ys[0].iter().zip(last).map(|(a, b)| a - b).collect();
        Some(CycNum::canonical(d, self.p, num, self.den_exp))
    }

    /// Value equality after lifting to the lcm level.
    pub fn value_eq(&self, other: &CycNum) -> bool {
        match self.harmonize(other) {
            Ok((a, b)) => a.num == b.num && a.den_exp == b.den_exp,
            Err(_) => false,
        }
    }

    /// If `self` is a root of unity, return it.
    pub fn as_root_of_unity(&self) -> Option<super::RootOfUnity> {
        if self.den_exp != 0 {
            return None;
        }
        let c = cyclo::get(self.level);
        let find = |sign: i64| {
            (0..self.level).find(|&j| {
                let entries = &c.powers[j as usize];
                self.num.iter().enumerate().all(|(i, v)| {
                    let want = entries.iter().find(|e| e.0 == i).map_or(0, |e| e.1);
                    *v == BigInt::from(sign * want)
                })
            })
        };
        if let Some(j) = find(1) {
            return Some(super::RootOfUnity::new(self.level, j as i64));
        }
        // for odd N the roots of unity of ℚ(ζ_N) are ±ζ_N^j
        if self.level % 2 == 1 {
            let n = 2 * self.level;
            return find(-1).map(|j| super::RootOfUnity::new(n, 2 * j as i64 + self.level as i64));
        }
        None
    }
}

fn rational_str(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = pow_p(self.p, self.den_exp);
        let mut first = true;
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let r = BigRational::new(c.clone(), den.clone());
            let neg = r.is_negative();
            let mag = r.abs();
            if neg {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            let mag_s = if mag.is_integer() {
                mag.numer().to_string()
            } else {
                format!("{}/{}", mag.numer(), mag.denom())
            };
            match i {
                0 => write!(f, "{mag_s}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag_s}*")?;
                    }
                    write!(f, "z{}", self.level)?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        self.value_eq(other)
    }
}

impl<'a> Add<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    /// Panics when the banned primes differ; use [`CycNum::try_add`].
    fn add(self, rhs: &'a CycNum) -> CycNum {
        self.try_add(rhs).expect("CycNum addition")
    }
}

impl<'a> Sub<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &'a CycNum) -> CycNum {
        self.try_sub(rhs).expect("CycNum subtraction")
    }
}

impl<'a> Mul<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    /// Panics when the banned primes differ; use [`CycNum::try_mul`].
    fn mul(self, rhs: &'a CycNum) -> CycNum {
        self.try_mul(rhs).expect("CycNum multiplication")
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            level: self.level,
            p: self.p,
            num: self.num.iter().map(|c| -c).collect(),
            den_exp: self.den_exp,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CycNumRepr {
    level: u64,
    p: u64,
    coeffs: Vec<String>,
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational, CoeffError> {
    let err = || CoeffError::Parse(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| err())?)),
    }
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycNumRepr {
            level: self.level,
            p: self.p,
            coeffs: self.coeffs().iter().map(rational_str).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = CycNumRepr::deserialize(d)?;
        let coeffs = r
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        CycNum::from_rational_coeffs(r.level, r.p, &coeffs).map_err(serde::de::Error::custom)
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64, k: i64) -> CycNum {
        CycNum::root_of_unity(n, k, 3)
    }

    #[test]
    fn phi3_relation() {
        let s = &z(3, 1) + &z(3, 2);
        assert_eq!(s, CycNum::from_int(3, -1));
    }

    #[test]
    fn quadratic_gauss_sum_times_conjugate() {
        // (1 + 2ζ)(1 + 2ζ²) = 1 + 2(ζ+ζ²) + 4 = 3
        let one = CycNum::from_int(3, 1);
        let two = CycNum::from_int(3, 2);
        let a = &one + &(&two * &z(3, 1));
        let b = &one + &(&two * &z(3, 2));
        assert_eq!(&a * &b, CycNum::from_int(3, 3));
        assert_eq!(a.conjugate(2), b);
    }

    #[test]
    fn roots_of_unity_examples() {
        assert_eq!(z(3, 3), CycNum::one(3));
        assert_eq!(z(9, 3), z(3, 1));
        assert_eq!(z(9, 3).level(), 9);
        assert_eq!(z(4, 2), CycNum::from_int(3, -1));
    }

    #[test]
    fn norms() {
        let a = &CycNum::from_int(3, 1) + &(&CycNum::from_int(3, 2) * &z(3, 1));
        assert_eq!(a.norm(), BigRational::from_integer(3.into()));
        assert!(a.is_unit());
        assert!(!CycNum::from_int(3, 2).is_unit());
        assert!(!CycNum::zero(5, 3).is_unit());
        for n in [1u64, 2, 5, 12, 36] {
            assert_eq!(z(n, 1).norm().abs(), BigRational::one());
        }
        let third = CycNum::p_power(3, -1);
        assert_eq!(third.norm(), BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn inverse_general_and_monomial() {
        let one = CycNum::one(3);
        // 1 + 2ζ_9 has norm 57 = 3·19
        let bad = &one + &(&CycNum::from_int(3, 2) * &z(9, 1));
        assert!(!bad.is_unit());
        for a in [
            &one - &z(9, 1),
            &(&one - &z(9, 2)) * &(&one + &z(9, 4)),
            &one + &z(3, 1),
        ] {
            assert!(a.is_unit());
            let inv = a.inverse().unwrap();
            assert_eq!(&a * &inv, one);
        }
        let m = &CycNum::p_power(3, 2) * &z(12, 5);
        assert_eq!(&m * &m.inverse().unwrap(), CycNum::one(3));
        assert!(CycNum::from_int(3, 2).inverse().is_err());
    }

    #[test]
    fn prime_mismatch_is_an_error() {
        let err = CycNum::one(3).try_add(&CycNum::one(5)).unwrap_err();
        assert_eq!(err, CoeffError::PrimeMismatch(3, 5));
    }

    #[test]
    fn denominators_are_checked() {
        let half = BigRational::new(1.into(), 2.into());
        assert!(CycNum::from_rational(3, &half).is_err());
        let ninth = BigRational::new(1.into(), 9.into());
        assert_eq!(CycNum::from_rational(3, &ninth).unwrap().den_exp(), 2);
    }

    #[test]
    fn json_round_trip() {
        let a = &CycNum::p_power(3, -2) + &z(3, 1);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"level":3,"p":3,"coeffs":["1/9","1/1"]}"#);
        let back: CycNum = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn display_is_readable() {
        let a = &CycNum::from_int(3, 1) + &(&CycNum::from_int(3, 2) * &z(3, 1));
        assert_eq!(a.to_string(), "1+2*z3");
        assert_eq!((-&z(9, 2)).to_string(), "-z9^2");
        assert_eq!(CycNum::zero(4, 2).to_string(), "0");
    }

    #[test]
    fn as_root_detects_roots() {
        assert_eq!(z(12, 7).as_root_of_unity().unwrap().exp(), 7);
        assert!(CycNum::from_int(3, 2).as_root_of_unity().is_none());
    }
}
