//! Finite quotient rings `𝒪_K/π^m`.
//!
//! Both kinds of field share one model, `A[x]/(h)` with `h` the residue
//! modulus of degree `f`:
//!
//! * padic: `A = ℤ/p^m`, so the ring is the Galois ring of characteristic
//!   `p^m` and degree `f`;
//! * laurent: `A = F_p[t]/t^m`, so the ring is `F_q[t]/t^m`.
//!
//! An element of `A` is stored as an integer in `[0, p^m)`. For laurent
//! fields its base-`p` digits are the `t`-coefficients. With this encoding
//! the uniformizer is the code `p` in both cases, `π`-adic valuation is the
//! number of trailing base-`p` zero digits, and reduction to a lower
//! precision `m'` is reduction of each code modulo `p^{m'}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::conway;
use super::{FieldKind, LocalFieldError, LocalFieldSpec};

/// Coordinates in the basis `1, x, …, x^{f-1}` over `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElem(pub(crate) Vec<u64>);

impl RingElem {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct QuotRing {
    field: LocalFieldSpec,
    m: u32,
    pm: u64,
    /// Monic residue modulus, coefficients as codes in `A`.
    modulus: Vec<u64>,
    /// `Tr(x^i)` to the prime base, for `i < f`.
    traces: Vec<u64>,
}

/// Size limit on `p^m` so that products of codes fit in `u128` comfortably.
const MAX_PM: u64 = 1 << 40;

type Cache = Mutex<HashMap<(LocalFieldSpec, u32), Arc<QuotRing>>>;

static CACHE: OnceLock<Cache> = OnceLock::new();

/// The ring `𝒪_K/π^m`, shared per `(field, m)`.
pub fn quot_ring(field: LocalFieldSpec, m: u32) -> Result<Arc<QuotRing>, LocalFieldError> {
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get(&(field, m))
    {
        return Ok(r.clone());
    }
    let r = Arc::new(QuotRing::new(field, m)?);
    Ok(cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .entry((field, m))
        .or_insert(r)
        .clone())
}

impl QuotRing {
    fn new(field: LocalFieldSpec, m: u32) -> Result<QuotRing, LocalFieldError> {
        if m == 0 {
            return Err(LocalFieldError::ZeroPrecision);
        }
        let p = field.p();
        let pm = (p as u128).pow(m);
        if pm > MAX_PM as u128 {
            return Err(LocalFieldError::TooLarge(format!("{p}^{m}")));
        }
        let mut r = QuotRing {
            field,
            m,
            pm: pm as u64,
            modulus: conway::modulus(p, field.f()),
            traces: Vec::new(),
        };
        let f = field.f();
        let mut traces = Vec::with_capacity(f);
        for i in 0..f {
            let xi = r.x_pow(i);
            let mut t = 0;
            for j in 0..f {
                let prod = r.mul(&xi, &r.x_pow(j));
                t = r.a_add(t, prod.0[j]);
            }
            traces.push(t);
        }
        r.traces = traces;
        Ok(r)
    }

    pub fn field(&self) -> LocalFieldSpec {
        self.field
    }

    pub fn precision(&self) -> u32 {
        self.m
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn f(&self) -> usize {
        self.field.f()
    }

    /// `p^m`, the number of codes in `A`.
    pub fn base_size(&self) -> u64 {
        self.pm
    }

    /// `q^m`, if it fits.
    pub fn size(&self) -> Option<u64> {
        (self.pm as u128)
            .checked_pow(self.f() as u32)
            .filter(|&s| s <= u64::MAX as u128)
            .map(|s| s as u64)
    }

    pub fn unit_count(&self) -> Option<u64> {
        let q = self.field.q();
        self.size().map(|s| s - s / q)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    // ---- base ring A ----

    pub(crate) fn a_add(&self, a: u64, b: u64) -> u64 {
        match self.field.kind() {
            FieldKind::Padic => ((a as u128 + b as u128) % self.pm as u128) as u64,
            FieldKind::Laurent => self.digitwise(a, b, |x, y, p| (x + y) % p),
        }
    }

    pub(crate) fn a_sub(&self, a: u64, b: u64) -> u64 {
        match self.field.kind() {
            FieldKind::Padic => {
                ((a as u128 + self.pm as u128 - b as u128) % self.pm as u128) as u64
            }
            FieldKind::Laurent => self.digitwise(a, b, |x, y, p| (x + p - y) % p),
        }
    }

    pub(crate) fn a_neg(&self, a: u64) -> u64 {
        self.a_sub(0, a)
    }

    fn digits(&self, mut a: u64) -> Vec<u64> {
        let p = self.p();
        (0..self.m)
            .map(|_| {
                let d = a % p;
                a /= p;
                d
            })
            .collect()
    }

    fn undigits(&self, d: &[u64]) -> u64 {
        let p = self.p();
        d.iter().rev().fold(0u64, |acc, &x| acc * p + x)
    }

    fn digitwise(&self, a: u64, b: u64, op: impl Fn(u64, u64, u64) -> u64) -> u64 {
        let p = self.p();
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut scale = 1u64;
        for _ in 0..self.m {
            out += op(a % p, b % p, p) * scale;
            a /= p;
            b /= p;
            scale = scale.saturating_mul(p);
        }
        out
    }

    pub(crate) fn a_mul(&self, a: u64, b: u64) -> u64 {
        match self.field.kind() {
            FieldKind::Padic => ((a as u128 * b as u128) % self.pm as u128) as u64,
            FieldKind::Laurent => {
                if a == 0 || b == 0 {
                    return 0;
                }
                let p = self.p();
                if b < p {
                    return self.digitwise(a, 0, |x, _, p| x * b % p);
                }
                let da = self.digits(a);
                let db = self.digits(b);
                let m = self.m as usize;
                let mut out = vec![0u64; m];
                for (i, &x) in da.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in db[..m - i].iter().enumerate() {
                        out[i + j] = (out[i + j] + x * y) % p;
                    }
                }
                self.undigits(&out)
            }
        }
    }

    /// Inverse of a unit of `A`.
    pub(crate) fn a_inv(&self, a: u64) -> Option<u64> {
        let p = self.p();
        if a.is_multiple_of(p) {
            return None;
        }
        // Newton iteration b ← b(2 − ab) from the residue inverse.
        let mut b = crate::coeff::fpoly::invmod(a % p, p);
        for _ in 0..self.m.next_power_of_two().trailing_zeros() + 1 {
            let ab = self.a_mul(a, b);
            b = self.a_mul(b, self.a_sub(self.a_from_int(2), ab));
        }
        debug_assert_eq!(self.a_mul(a, b), 1);
        Some(b)
    }

    pub(crate) fn a_from_int(&self, v: i64) -> u64 {
        match self.field.kind() {
            FieldKind::Padic => (v as i128).rem_euclid(self.pm as i128) as u64,
            FieldKind::Laurent => (v as i128).rem_euclid(self.p() as i128) as u64,
        }
    }

    /// `π`-adic valuation of a code in `A`, capped at `m`.
    pub(crate) fn a_val(&self, mut a: u64) -> u32 {
        if a == 0 {
            return self.m;
        }
        let p = self.p();
        let mut v = 0;
        while a.is_multiple_of(p) {
            a /= p;
            v += 1;
        }
        v
    }

    // ---- the ring A[x]/(h) ----

    pub fn zero(&self) -> RingElem {
        RingElem(vec![0; self.f()])
    }

    pub fn one(&self) -> RingElem {
        self.from_base(1)
    }

    /// Embed a code of `A`.
    pub fn from_base(&self, a: u64) -> RingElem {
        let mut c = vec![0; self.f()];
        c[0] = a % self.pm;
        RingElem(c)
    }

    pub fn from_int(&self, v: i64) -> RingElem {
        self.from_base(self.a_from_int(v))
    }

    /// Build from coordinates, reducing each into `A`.
    pub fn from_coords(&self, coords: &[u64]) -> Result<RingElem, LocalFieldError> {
        if coords.len() != self.f() {
            return Err(LocalFieldError::Parse(format!(
                "expected {} coordinates, got {}",
                self.f(),
                coords.len()
            )));
        }
        Ok(RingElem(coords.iter().map(|&c| c % self.pm).collect()))
    }

    /// The uniformizer `π`.
    pub fn pi(&self) -> RingElem {
        self.from_base(self.p())
    }

    /// The class of `x`, a lift of the residue generator.
    pub fn gen(&self) -> RingElem {
        self.x_pow(1)
    }

    fn x_pow(&self, i: usize) -> RingElem {
        let f = self.f();
        if i < f {
            let mut c = vec![0; f];
            c[i] = 1;
            RingElem(c)
        } else {
            let x = self.x_pow(1);
            self.pow(&x, i as u128)
        }
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| self.a_add(x, y))
                .collect(),
        )
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| self.a_sub(x, y))
                .collect(),
        )
    }

    pub fn neg(&self, a: &RingElem) -> RingElem {
        RingElem(a.0.iter().map(|&x| self.a_neg(x)).collect())
    }

    pub fn scale(&self, a: &RingElem, k: u64) -> RingElem {
        RingElem(a.0.iter().map(|&x| self.a_mul(x, k)).collect())
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let f = self.f();
        if f == 1 {
            return RingElem(vec![self.a_mul(a.0[0], b.0[0])]);
        }
        let mut acc = vec![0u64; 2 * f - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                if y != 0 {
                    acc[i + j] = self.a_add(acc[i + j], self.a_mul(x, y));
                }
            }
        }
        for k in (f..2 * f - 1).rev() {
            let c = acc[k];
            if c == 0 {
                continue;
            }
            acc[k] = 0;
            for j in 0..f {
                let h = self.modulus[j];
                if h != 0 {
                    acc[k - f + j] = self.a_sub(acc[k - f + j], self.a_mul(c, h));
                }
            }
        }
        acc.truncate(f);
        RingElem(acc)
    }

    pub fn pow(&self, a: &RingElem, mut e: u128) -> RingElem {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    pub fn is_unit(&self, a: &RingElem) -> bool {
        let p = self.p();
        a.0.iter().any(|&c| c % p != 0)
    }

    pub fn is_zero(&self, a: &RingElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    /// `π`-adic valuation, or `None` for zero.
    pub fn valuation(&self, a: &RingElem) -> Option<u32> {
        if self.is_zero(a) {
            return None;
        }
        a.0.iter().map(|&c| self.a_val(c)).min()
    }

    pub fn inv(&self, a: &RingElem) -> Option<RingElem> {
        if !self.is_unit(a) {
            return None;
        }
        if self.f() == 1 {
            return self.a_inv(a.0[0]).map(|b| RingElem(vec![b]));
        }
        let units = self.unit_count_u128();
        Some(self.pow(a, units - 1))
    }

    fn unit_count_u128(&self) -> u128 {
        let q = self.field.q() as u128;
        let size = (self.pm as u128).pow(self.f() as u32);
        size - size / q
    }

    /// `a / π^k` for `a` divisible by `π^k`, as an element of precision `m - k`.
    pub(crate) fn div_pi_pow_coords(&self, a: &RingElem, k: u32) -> Vec<u64> {
        let pk = self.p().pow(k);
        a.0.iter()
            .map(|&c| {
                debug_assert_eq!(c % pk, 0);
                c / pk
            })
            .collect()
    }

    /// `π^k · a`, truncated at the ring precision.
    pub fn mul_pi_pow(&self, a: &RingElem, k: u32) -> RingElem {
        if k >= self.m {
            return self.zero();
        }
        let pk = self.p().pow(k);
        RingElem(a.0.iter().map(|&c| c * pk % self.pm).collect())
    }

    /// Reduce an element of a ring of precision `>= self.m`.
    pub(crate) fn reduce_coords(&self, coords: &[u64]) -> RingElem {
        RingElem(coords.iter().map(|&c| c % self.pm).collect())
    }

    /// Enumeration index `Σ c_i (p^m)^i`.
    pub fn index(&self, a: &RingElem) -> u64 {
        a.0.iter().rev().fold(0u64, |acc, &c| acc * self.pm + c)
    }

    pub fn from_index(&self, mut idx: u64) -> RingElem {
        RingElem(
            (0..self.f())
                .map(|_| {
                    let c = idx % self.pm;
                    idx /= self.pm;
                    c
                })
                .collect(),
        )
    }

    /// Trace to the prime base `ℤ/p^m` or `F_p[t]/t^m`, as a code.
    pub fn trace_to_prime(&self, a: &RingElem) -> u64 {
        a.0.iter()
            .zip(&self.traces)
            .fold(0, |acc, (&c, &t)| self.a_add(acc, self.a_mul(c, t)))
    }

    /// Evaluate a polynomial with coefficients in `A` at `r`.
    pub(crate) fn eval_base_poly(&self, poly: &[u64], r: &RingElem) -> RingElem {
        let mut acc = self.zero();
        for &c in poly.iter().rev() {
            acc = self.add(&self.mul(&acc, r), &self.from_base(c));
        }
        acc
    }

    /// Newton-lift an approximate root of a polynomial over `A` whose
    /// derivative is a unit at the root.
    pub(crate) fn newton_root(&self, poly: &[u64], start: &RingElem) -> RingElem {
        let deriv: Vec<u64> = poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.a_mul(c, self.a_from_int(i as i64)))
            .collect();
        let mut r = start.clone();
        for _ in 0..=self.m {
            let v = self.eval_base_poly(poly, &r);
            if self.is_zero(&v) {
                break;
            }
            let d = self.eval_base_poly(&deriv, &r);
            let dinv = self.inv(&d).expect("separable root");
            r = self.sub(&r, &self.mul(&v, &dinv));
        }
        debug_assert!(self.is_zero(&self.eval_base_poly(poly, &r)));
        r
    }

    /// Residue of `a` as coordinates over `F_p`.
    pub fn residue(&self, a: &RingElem) -> Vec<u64> {
        let p = self.p();
        a.0.iter().map(|&c| c % p).collect()
    }
}
