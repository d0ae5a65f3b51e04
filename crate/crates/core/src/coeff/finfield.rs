use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::fpoly;
use super::CoeffError;

/// `F_l[x] / (m)` for a monic irreducible `m` of degree `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinField {
    l: u64,
    d: usize,
    modulus: Vec<u64>,
}

/// Rabin's test: `m` of degree `d` is irreducible iff `x^{l^d} ≡ x` and
/// `gcd(x^{l^{d/r}} - x, m) = 1` for each prime `r | d`.
pub(crate) fn is_irreducible(m: &[u64], l: u64) -> bool {
    let Some(d) = fpoly::degree(m) else {
        return false;
    };
    if d == 0 {
        return false;
    }
    let frob_iter = |k: usize| {
        let mut y = vec![0, 1];
        for _ in 0..k {
            y = fpoly::poly_powmod(&y, l as u128, m, l);
        }
        y
    };
    let x = fpoly::poly_rem(&[0, 1], m, l);
    if frob_iter(d) != x {
        return false;
    }
    for (r, _) in fpoly::factorize(d as u64) {
        let y = frob_iter(d / r as usize);
        let g = fpoly::poly_gcd(&fpoly::poly_sub(&y, &x, l), m, l);
        if fpoly::degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

impl FinField {
    /// `modulus` is low-degree-first and must be monic irreducible mod `l`.
    pub fn new(l: u64, modulus: Vec<u64>) -> Result<Arc<FinField>, CoeffError> {
        if !fpoly::is_prime(l) {
            return Err(CoeffError::NotPrime(l));
        }
        let mut m: Vec<u64> = modulus.iter().map(|c| c % l).collect();
        fpoly::trim(&mut m);
        let d = fpoly::degree(&m).unwrap_or(0);
        if d == 0 || m[d] != 1 || !is_irreducible(&m, l) {
            return Err(CoeffError::Parse(format!(
                "modulus {modulus:?} is not monic irreducible over F_{l}"
            )));
        }
        Ok(Arc::new(FinField { l, d, modulus: m }))
    }

    pub(crate) fn new_unchecked(l: u64, modulus: Vec<u64>) -> Arc<FinField> {
        let d = modulus.len() - 1;
        Arc::new(FinField { l, d, modulus })
    }

    pub fn prime_field(l: u64) -> Result<Arc<FinField>, CoeffError> {
        FinField::new(l, vec![0, 1])
    }

    pub fn characteristic(&self) -> u64 {
        self.l
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> u128 {
        (self.l as u128).pow(self.d as u32)
    }
}

#[derive(Debug, Clone)]
pub struct FinFieldElem {
    field: Arc<FinField>,
    rep: Vec<u64>,
}

impl PartialEq for FinFieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.rep == other.rep
    }
}

impl Eq for FinFieldElem {}

impl FinFieldElem {
    pub fn from_poly(field: &Arc<FinField>, coeffs: &[u64]) -> FinFieldElem {
        let l = field.l;
        let reduced: Vec<u64> = coeffs.iter().map(|c| c % l).collect();
        FinFieldElem {
            field: field.clone(),
            rep: fpoly::poly_rem(&reduced, &field.modulus, l),
        }
    }

    pub fn from_int(field: &Arc<FinField>, v: i64) -> FinFieldElem {
        FinFieldElem::from_poly(field, &[fpoly::reduce_i64(v, field.l)])
    }

    pub fn zero(field: &Arc<FinField>) -> FinFieldElem {
        FinFieldElem {
            field: field.clone(),
            rep: Vec::new(),
        }
    }

    pub fn one(field: &Arc<FinField>) -> FinFieldElem {
        FinFieldElem::from_int(field, 1)
    }

    /// The class of `x`.
    pub fn generator(field: &Arc<FinField>) -> FinFieldElem {
        FinFieldElem::from_poly(field, &[0, 1])
    }

    pub fn field(&self) -> &Arc<FinField> {
        &self.field
    }

    /// Coordinates in `1, x, …, x^{d-1}`, padded to length `d`.
    pub fn coords(&self) -> Vec<u64> {
        let mut c = self.rep.clone();
        c.resize(self.field.d, 0);
        c
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_empty()
    }

    fn check(&self, other: &FinFieldElem) -> Result<(), CoeffError> {
        if self.field != other.field {
            return Err(CoeffError::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &FinFieldElem) -> Result<FinFieldElem, CoeffError> {
        self.check(other)?;
        let neg: Vec<u64> = other
            .rep
            .iter()
            .map(|&c| fpoly::submod(0, c, self.field.l))
            .collect();
        Ok(FinFieldElem {
            field: self.field.clone(),
            rep: fpoly::poly_sub(&self.rep, &neg, self.field.l),
        })
    }

    pub fn sub(&self, other: &FinFieldElem) -> Result<FinFieldElem, CoeffError> {
        self.check(other)?;
        Ok(FinFieldElem {
            field: self.field.clone(),
            rep: fpoly::poly_sub(&self.rep, &other.rep, self.field.l),
        })
    }

    pub fn neg(&self) -> FinFieldElem {
        FinFieldElem {
            field: self.field.clone(),
            rep: fpoly::poly_sub(&[], &self.rep, self.field.l),
        }
    }

    pub fn mul(&self, other: &FinFieldElem) -> Result<FinFieldElem, CoeffError> {
        self.check(other)?;
        Ok(FinFieldElem {
            field: self.field.clone(),
            rep: fpoly::poly_mulmod(&self.rep, &other.rep, &self.field.modulus, self.field.l),
        })
    }

    pub fn scale(&self, k: u64) -> FinFieldElem {
        let l = self.field.l;
        let mut rep: Vec<u64> = self
            .rep
            .iter()
            .map(|&c| fpoly::mulmod(c, k % l, l))
            .collect();
        fpoly::trim(&mut rep);
        FinFieldElem {
            field: self.field.clone(),
            rep,
        }
    }

    pub fn pow(&self, e: u128) -> FinFieldElem {
        FinFieldElem {
            field: self.field.clone(),
            rep: fpoly::poly_powmod(&self.rep, e, &self.field.modulus, self.field.l),
        }
    }

    pub fn inv(&self) -> Result<FinFieldElem, CoeffError> {
        let rep = fpoly::poly_invmod(&self.rep, &self.field.modulus, self.field.l)
            .ok_or(CoeffError::DivisionByZero)?;
        Ok(FinFieldElem {
            field: self.field.clone(),
            rep,
        })
    }

    /// `y ↦ y^l`.
    pub fn frobenius(&self) -> FinFieldElem {
        self.pow(self.field.l as u128)
    }
}

impl fmt::Display for FinFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rep.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.rep.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}*x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for FinFieldElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FinFieldElem", 3)?;
        st.serialize_field("l", &self.field.l)?;
        st.serialize_field("modulus", &self.field.modulus)?;
        st.serialize_field("coords", &self.coords())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_arithmetic() {
        let f = FinField::new(2, vec![1, 1, 1]).unwrap();
        let x = FinFieldElem::generator(&f);
        let x2 = x.mul(&x).unwrap();
        // x^2 = x + 1
        assert_eq!(x2, x.add(&FinFieldElem::one(&f)).unwrap());
        assert_eq!(x.pow(3), FinFieldElem::one(&f));
        assert_eq!(x.inv().unwrap(), x2);
        assert_eq!(x.frobenius(), x2);
        assert_eq!(f.order(), 4);
    }

    #[test]
    fn rejects_reducible_modulus() {
        assert!(FinField::new(2, vec![1, 0, 1]).is_err());
        assert!(FinField::new(4, vec![0, 1]).is_err());
        assert!(FinField::new(7, vec![1, 0, 1]).is_ok());
    }

    #[test]
    fn zero_has_no_inverse() {
        let f = FinField::prime_field(5).unwrap();
        assert_eq!(
            FinFieldElem::zero(&f).inv().unwrap_err(),
            CoeffError::DivisionByZero
        );
        assert_eq!(FinFieldElem::from_int(&f, -1).to_string(), "4");
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let a = FinField::prime_field(5).unwrap();
        let b = FinField::prime_field(7).unwrap();
        let e = FinFieldElem::one(&a).add(&FinFieldElem::one(&b));
        assert_eq!(e.unwrap_err(), CoeffError::FieldMismatch);
    }
}
