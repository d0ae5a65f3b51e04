use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::coeff::{CycNum, RootOfUnity};
use crate::localfield::{
    quot_ring, unit_group, unramified_ext, KElement, LocalFieldError, LocalFieldSpec, RingElem,
    UnitGroupPresentation,
};

use super::CharError;

/// A character of `K^×`: `χ(π^v u) = χ(π)^v · Π ζ_{d_i}^{e_i k_i}` where
/// `u ≡ Π g_i^{k_i}` in `(𝒪/π^a)^×` and `a` is the conductor exponent.
#[derive(Debug, Clone)]
pub struct MulChar {
    field: LocalFieldSpec,
    cond: u32,
    pi_value: CycNum,
    exps: Vec<u64>,
    units: Option<Arc<UnitGroupPresentation>>,
}

/// Wire form: `{field, cond, pi_value, unit_exps}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulCharRepr {
    pub field: LocalFieldSpec,
    pub cond: u32,
    pub pi_value: CycNum,
    pub unit_exps: Vec<u64>,
}

impl PartialEq for MulChar {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.cond == other.cond
            && self.exps == other.exps
            && self.pi_value == other.pi_value
    }
}

fn group(field: LocalFieldSpec, a: u32) -> Result<Option<Arc<UnitGroupPresentation>>, CharError> {
    Ok(if a == 0 {
        None
    } else {
        Some(unit_group(field, a)?)
    })
}

/// Root of unity `Π ζ_{d_i}^{e_i k_i}` on the exponent lattice.
fn pairing(orders: &[u64], exps: &[u64], ks: &[u64]) -> RootOfUnity {
    let e = orders.first().copied().unwrap_or(1);
    let s = orders
        .iter()
        .zip(exps)
        .zip(ks)
        .fold(0u128, |acc, ((&d, &ei), &ki)| {
            (acc + (ei as u128) * (e / d) as u128 * ki as u128) % e as u128
        });
    RootOfUnity::new(e, s as i64)
}

/// Generators of `(1 + π^j 𝒪)/(1 + π^a 𝒪)` for `j >= 1`, as units mod `π^a`.
fn higher_unit_generators(
    field: LocalFieldSpec,
    j: u32,
    a: u32,
) -> Result<Vec<RingElem>, CharError> {
    let r = quot_ring(field, a)?;
    let mut out = Vec::new();
    for level in j..a {
        for i in 0..field.f() {
            let mut c = vec![0u64; field.f()];
            c[i] = 1;
            let basis = r.from_coords(&c)?;
            out.push(r.add(&r.one(), &r.mul_pi_pow(&basis, level)));
        }
    }
    Ok(out)
}

impl MulChar {
    /// Strict constructor: `exps` must be given on the generators of
    /// `(𝒪/π^cond)^×` and `cond` must be the exact conductor exponent.
    pub fn new(
        field: LocalFieldSpec,
        cond: u32,
        pi_value: CycNum,
        exps: Vec<u64>,
    ) -> Result<Self, CharError> {
        let chi = Self::unchecked(field, cond, pi_value, exps)?;
        if chi.cond > 0 {
            let nontrivial = if chi.cond == 1 {
                chi.exps.iter().any(|&e| e != 0)
            } else {
                higher_unit_generators(field, chi.cond - 1, chi.cond)?
                    .iter()
                    .any(|u| !chi.eval_unit_root(u).map(|r| r.is_one()).unwrap_or(true))
            };
            if !nontrivial {
                return Err(CharError::NotMinimal(chi.cond - 1));
            }
        }
        Ok(chi)
    }

    fn unchecked(
        field: LocalFieldSpec,
        cond: u32,
        pi_value: CycNum,
        exps: Vec<u64>,
    ) -> Result<Self, CharError> {
        if pi_value.p() != field.p() {
            return Err(crate::coeff::CoeffError::PrimeMismatch(pi_value.p(), field.p()).into());
        }
        if !pi_value.is_unit() {
            return Err(CharError::PiValueNotUnit);
        }
        let units = group(field, cond)?;
        let orders: &[u64] = units.as_ref().map_or(&[], |u| u.orders());
        if exps.len() != orders.len() {
            return Err(CharError::ExponentCount {
                expected: orders.len(),
                got: exps.len(),
            });
        }
        let exps = exps.iter().zip(orders).map(|(&e, &d)| e % d).collect();
        Ok(MulChar {
            field,
            cond,
            pi_value,
            exps,
            units,
        })
    }

    /// Character given by exponents on the generators of `(𝒪/π^a)^×`,
    /// normalized to its true conductor.
    pub fn from_exponents(
        field: LocalFieldSpec,
        a: u32,
        pi_value: CycNum,
        exps: Vec<u64>,
    ) -> Result<Self, CharError> {
        let chi = Self::unchecked(field, a, pi_value, exps)?;
        chi.normalized()
    }

    fn trivial_on_level(&self, j: u32) -> Result<bool, CharError> {
        if j >= self.cond {
            return Ok(true);
        }
        if j == 0 {
            return Ok(self.exps.iter().all(|&e| e == 0));
        }
        Ok(higher_unit_generators(self.field, j, self.cond)?
            .iter()
            .all(|u| self.eval_unit_root(u).map(|r| r.is_one()).unwrap_or(false)))
    }

    fn normalized(self) -> Result<Self, CharError> {
        let mut a = self.cond;
        while a > 0 && self.trivial_on_level(a - 1)? {
            a -= 1;
        }
        if a == self.cond {
            return Ok(self);
        }
        let target = group(self.field, a)?;
        let exps = match &target {
            None => Vec::new(),
            Some(g) => g
                .generators()
                .iter()
                .zip(g.orders())
                .map(|(gen, &d)| {
                    let r = self.eval_unit_root(gen)?;
                    Ok(r.exponent_at(d)
                        .expect("value order divides generator order"))
                })
                .collect::<Result<Vec<_>, CharError>>()?,
        };
        Ok(MulChar {
            field: self.field,
            cond: a,
            pi_value: self.pi_value,
            exps,
            units: target,
        })
    }

    /// Character determined by its unit values on `(𝒪/π^a)^×`.
    fn from_unit_values(
        field: LocalFieldSpec,
        a: u32,
        pi_value: CycNum,
        value: impl Fn(&RingElem) -> Result<RootOfUnity, CharError>,
    ) -> Result<Self, CharError> {
        let exps = match group(field, a)? {
            None => Vec::new(),
            Some(g) => g
                .generators()
                .iter()
                .zip(g.orders())
                .map(|(gen, &d)| {
                    let r = value(gen)?;
                    Ok(r.exponent_at(d)
                        .expect("value order divides generator order"))
                })
                .collect::<Result<_, CharError>>()?,
        };
        Self::from_exponents(field, a, pi_value, exps)
    }

    pub fn trivial(field: LocalFieldSpec) -> Self {
        Self::unramified(field, CycNum::one(field.p())).expect("1 is a unit")
    }

    /// The unramified character with `θ(π) = pi_value`.
    pub fn unramified(field: LocalFieldSpec, pi_value: CycNum) -> Result<Self, CharError> {
        Self::new(field, 0, pi_value, Vec::new())
    }

    /// `|·|_K`, unramified with value `q^{-1}` at `π`.
    pub fn abs_char(field: LocalFieldSpec) -> Self {
        let q = field.q() as i64;
        let v = CycNum::p_power(field.p(), -(field.f() as i64));
        debug_assert_eq!(
            v.as_rational().unwrap(),
            num_rational::BigRational::new(1.into(), q.into())
        );
        Self::unramified(field, v).expect("q^-1 is a unit")
    }

    pub fn field(&self) -> LocalFieldSpec {
        self.field
    }

    /// Conductor exponent `a(χ)`.
    pub fn conductor(&self) -> u32 {
        self.cond
    }

    /// `Sw(χ) = max(a(χ) - 1, 0)`.
    pub fn swan(&self) -> u32 {
        self.cond.saturating_sub(1)
    }

    pub fn is_unramified(&self) -> bool {
        self.cond == 0
    }

    pub fn pi_value(&self) -> &CycNum {
        &self.pi_value
    }

    pub fn unit_exps(&self) -> &[u64] {
        &self.exps
    }

    /// Generator orders `d_i` of `(𝒪/π^a)^×`.
    pub fn unit_orders(&self) -> &[u64] {
        self.units.as_ref().map_or(&[], |u| u.orders())
    }

    pub fn unit_group(&self) -> Option<&Arc<UnitGroupPresentation>> {
        self.units.as_ref()
    }

    /// Order of the root of unity `χ` takes on a generator-exponent
    /// combination; all unit values are powers of `ζ_E`.
    pub fn unit_value_order(&self) -> u64 {
        self.unit_orders().first().copied().unwrap_or(1)
    }

    /// Value on a unit given modulo `π^j`, `j >= a(χ)`.
    pub fn eval_unit_root(&self, u: &RingElem) -> Result<RootOfUnity, CharError> {
        let Some(g) = &self.units else {
            return Ok(RootOfUnity::one());
        };
        let ks = g.dlog(&g.ring().reduce_coords(u.coords()))?;
        Ok(pairing(g.orders(), &self.exps, ks))
    }

    /// Exponent of `χ(u)` against `ζ_E`, `E = unit_value_order()`, by
    /// position in the enumeration of `(𝒪/π^a)^×`.
    pub(crate) fn unit_exponent_at(&self, position: usize) -> u64 {
        match &self.units {
            None => 0,
            Some(g) => {
                let r = pairing(g.orders(), &self.exps, g.dlog_at(position));
                r.exponent_at(self.unit_value_order()).unwrap()
            }
        }
    }

    pub fn eval(&self, x: &KElement) -> Result<CycNum, CharError> {
        if x.field() != self.field {
            return Err(CharError::FieldMismatch(x.field(), self.field));
        }
        if x.precision() < self.cond {
            return Err(LocalFieldError::InsufficientPrecision {
                needed: self.cond as i64,
                have: x.precision() as i64,
            }
            .into());
        }
        let unit = self.eval_unit_root(x.unit())?.to_cyc(self.field.p());
        Ok(&self.pi_value.pow(x.valuation())? * &unit)
    }

    fn check_same(&self, other: &MulChar) -> Result<(), CharError> {
        if self.field != other.field {
            return Err(CharError::FieldMismatch(self.field, other.field));
        }
        Ok(())
    }

    pub fn mul(&self, other: &MulChar) -> Result<MulChar, CharError> {
        self.check_same(other)?;
        let a = self.cond.max(other.cond);
        Self::from_unit_values(self.field, a, &self.pi_value * &other.pi_value, |u| {
            Ok(self.eval_unit_root(u)?.mul(&other.eval_unit_root(u)?))
        })
    }

    pub fn inv(&self) -> Result<MulChar, CharError> {
        let exps = self
            .exps
            .iter()
            .zip(self.unit_orders())
            .map(|(&e, &d)| (d - e) % d)
            .collect();
        Ok(MulChar {
            field: self.field,
            cond: self.cond,
            pi_value: self.pi_value.inverse()?,
            exps,
            units: self.units.clone(),
        })
    }

    pub fn pow(&self, k: i64) -> Result<MulChar, CharError> {
        let orders = self.unit_orders().to_vec();
        let exps = self
            .exps
            .iter()
            .zip(&orders)
            .map(|(&e, &d)| (e as i128 * k as i128).rem_euclid(d as i128) as u64)
            .collect();
        Self::from_exponents(self.field, self.cond, self.pi_value.pow(k)?, exps)
    }

    /// `χ · |·|_K`.
    pub fn abs_twist(&self) -> Result<MulChar, CharError> {
        self.mul(&MulChar::abs_char(self.field))
    }

    /// Multiply the value at `π` by a unit, leaving the unit values alone.
    pub fn with_pi_value(&self, pi_value: CycNum) -> Result<MulChar, CharError> {
        Self::unchecked(self.field, self.cond, pi_value, self.exps.clone())
    }

    /// `χ ∘ N_{L/K}` on an unramified extension `L`.
    pub fn norm_inflate(&self, top: LocalFieldSpec) -> Result<MulChar, CharError> {
        if !top.is_extension_of(&self.field) {
            return Err(LocalFieldError::NotUnramified {
                base: self.field,
                top,
            }
            .into());
        }
        let fprime = (top.f() / self.field.f()) as i64;
        let pi_value = self.pi_value.pow(fprime)?;
        if self.cond == 0 {
            return Self::unramified(top, pi_value);
        }
        let ext = unramified_ext(self.field, top, self.cond)?;
        Self::from_unit_values(top, self.cond, pi_value, |u| {
            self.eval_unit_root(&ext.norm(u))
        })
    }

    pub fn to_repr(&self) -> MulCharRepr {
        MulCharRepr {
            field: self.field,
            cond: self.cond,
            pi_value: self.pi_value.clone(),
            unit_exps: self.exps.clone(),
        }
    }

    /// Strict parse of the wire form.
    pub fn from_repr(r: &MulCharRepr) -> Result<MulChar, CharError> {
        Self::new(r.field, r.cond, r.pi_value.clone(), r.unit_exps.clone())
    }

    /// All characters trivial on `1 + π^a 𝒪` with the given value at `π`,
    /// in odometer order on the exponents at level `a`. With `exact`, only
    /// those of conductor exactly `a`.
    pub fn family(
        field: LocalFieldSpec,
        a: u32,
        pi_value: &CycNum,
        exact: bool,
        cap: u128,
    ) -> Result<Vec<MulChar>, CharError> {
        let orders: Vec<u64> = group(field, a)?.map_or(Vec::new(), |g| g.orders().to_vec());
        let size: u128 = orders.iter().map(|&d| d as u128).product();
        if size > cap {
            return Err(CharError::FamilyTooLarge { size, cap });
        }
        let mut out = Vec::new();
        let mut exps = vec![0u64; orders.len()];
        loop {
            let chi = Self::from_exponents(field, a, pi_value.clone(), exps.clone())?;
            if !exact || chi.conductor() == a {
                out.push(chi);
            }
            let mut i = exps.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                exps[i] += 1;
                if exps[i] < orders[i] {
                    break;
                }
                exps[i] = 0;
            }
        }
    }

    /// Exact multiplicative order of the restriction to units.
    pub fn unit_order(&self) -> u64 {
        self.exps
            .iter()
            .zip(self.unit_orders())
            .fold(1u64, |acc, (&e, &d)| acc.lcm(&(d / e.gcd(&d))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::k_mul;

    fn q3() -> LocalFieldSpec {
        LocalFieldSpec::padic(3, 1).unwrap()
    }

    fn quadratic() -> MulChar {
        MulChar::new(q3(), 1, CycNum::one(3), vec![1]).unwrap()
    }

    #[test]
    fn quadratic_values() {
        let chi = quadratic();
        let two = KElement::from_int(q3(), 2, 1).unwrap();
        assert_eq!(chi.eval(&two).unwrap(), CycNum::from_int(3, -1));
        let four = KElement::from_int(q3(), 4, 2).unwrap();
        assert_eq!(chi.eval(&four).unwrap(), CycNum::one(3));
        assert_eq!(
            chi.eval(&KElement::one(q3(), 1).unwrap()).unwrap(),
            CycNum::one(3)
        );
        assert_eq!(chi.swan(), 0);
    }

    #[test]
    fn products_and_inverses() {
        let chi = quadratic();
        let sq = chi.mul(&chi).unwrap();
        assert_eq!(sq.conductor(), 0);
        assert_eq!(sq, MulChar::trivial(q3()));
        let prod = chi.mul(&chi.inv().unwrap()).unwrap();
        assert_eq!(prod, MulChar::trivial(q3()));
    }

    #[test]
    fn absolute_value_character() {
        let abs = MulChar::abs_char(q3());
        let pi = KElement::pi_power(q3(), 1, 1).unwrap();
        assert_eq!(abs.eval(&pi).unwrap(), CycNum::p_power(3, -1));
        let k = LocalFieldSpec::laurent(2, 2).unwrap();
        let pi = KElement::pi_power(k, 1, 1).unwrap();
        assert_eq!(
            MulChar::abs_char(k).eval(&pi).unwrap(),
            CycNum::p_power(2, -2)
        );
    }

    #[test]
    fn strict_constructor_rejects_non_minimal() {
        // exponent 3 on the order-6 generator of (Z/9)^× is the quadratic
        // character, conductor 1
        let e = MulChar::new(q3(), 2, CycNum::one(3), vec![3]).unwrap_err();
        assert_eq!(e, CharError::NotMinimal(1));
        let chi = MulChar::from_exponents(q3(), 2, CycNum::one(3), vec![3]).unwrap();
        assert_eq!(chi, quadratic());
        assert!(MulChar::new(q3(), 1, CycNum::one(3), vec![0]).is_err());
        assert!(MulChar::new(q3(), 1, CycNum::from_int(3, 2), vec![1]).is_err());
        assert!(MulChar::new(q3(), 1, CycNum::one(3), vec![1, 0]).is_err());
    }

    #[test]
    fn multiplicative_in_x() {
        let k = LocalFieldSpec::padic(5, 1).unwrap();
        let chi = MulChar::new(k, 2, CycNum::from_int(5, 7).pow(0).unwrap(), vec![3]).unwrap();
        let g = unit_group(k, 3).unwrap();
        for i in (0..g.order()).step_by(7) {
            for j in (0..g.order()).step_by(5) {
                let x = KElement::new(k, 1, 3, g.unit_at(i)).unwrap();
                let y = KElement::new(k, -2, 3, g.unit_at(j)).unwrap();
                let xy = k_mul(&x, &y).unwrap();
                assert_eq!(
                    chi.eval(&xy).unwrap(),
                    &chi.eval(&x).unwrap() * &chi.eval(&y).unwrap()
                );
            }
        }
    }

    #[test]
    fn conductor_minimality_by_enumeration() {
        let k = LocalFieldSpec::padic(3, 1).unwrap();
        for chi in MulChar::family(k, 3, &CycNum::one(3), false, 1000).unwrap() {
            let a = chi.conductor();
            if a == 0 {
                continue;
            }
            // nontrivial on 1 + π^{a-1}: some unit ≡ 1 mod π^{a-1} has χ ≠ 1
            let g = unit_group(k, a).unwrap();
            let r = g.ring();
            let mut found = false;
            for pos in 0..g.order() {
                let u = g.unit_at(pos);
                let d = r.sub(&u, &r.one());
                let deep = a == 1 || r.valuation(&d).is_some_and(|v| v >= a - 1);
                if deep && !chi.eval_unit_root(&u).unwrap().is_one() {
                    found = true;
                }
            }
            assert!(found, "{:?}", chi.unit_exps());
        }
    }

    #[test]
    fn families_have_expected_sizes() {
        let one = CycNum::one(3);
        assert_eq!(MulChar::family(q3(), 1, &one, false, 100).unwrap().len(), 2);
        assert_eq!(MulChar::family(q3(), 2, &one, false, 100).unwrap().len(), 6);
        assert_eq!(MulChar::family(q3(), 2, &one, true, 100).unwrap().len(), 4);
        let f2 = LocalFieldSpec::laurent(2, 1).unwrap();
        assert!(MulChar::family(f2, 1, &CycNum::one(2), true, 100)
            .unwrap()
            .is_empty());
        assert!(MulChar::family(q3(), 4, &one, false, 10).is_err());
    }

    #[test]
    fn norm_inflation_of_quadratic_character() {
        let chi = quadratic();
        let l = q3().extension(2).unwrap();
        let chi_l = chi.norm_inflate(l).unwrap();
        assert_eq!(chi_l.conductor(), 1);
        assert_eq!(chi_l.pi_value(), &CycNum::one(3));
        // on F_9^× the inflated character has order 2
        assert_eq!(chi_l.unit_order(), 2);
    }

    #[test]
    fn repr_round_trip() {
        let chi = quadratic();
        let s = serde_json::to_string(&chi.to_repr()).unwrap();
        assert_eq!(
            s,
            r#"{"field":"padic:p=3,f=1","cond":1,"pi_value":{"level":1,"p":3,"coeffs":["1/1"]},"unit_exps":[1]}"#
        );
        let back: MulCharRepr = serde_json::from_str(&s).unwrap();
        assert_eq!(MulChar::from_repr(&back).unwrap(), chi);
    }
}
