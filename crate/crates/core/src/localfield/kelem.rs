use serde::{Deserialize, Serialize};

use super::ring::{quot_ring, RingElem};
use super::{FieldKind, LocalFieldError, LocalFieldSpec};

/// `x = π^val · u` with `u` a unit known modulo `π^prec`; so `x` is known
/// modulo `π^{val+prec}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KElement {
    field: LocalFieldSpec,
    val: i64,
    prec: u32,
    unit: RingElem,
}

/// Wire form of a [`KElement`]; the field comes from context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KElementRepr {
    pub val: i64,
    pub prec: u32,
    pub unit: Vec<u64>,
}

impl KElement {
    pub fn new(
        field: LocalFieldSpec,
        val: i64,
        prec: u32,
        unit: RingElem,
    ) -> Result<Self, LocalFieldError> {
        let r = quot_ring(field, prec)?;
        let unit = r.from_coords(unit.coords())?;
        if !r.is_unit(&unit) {
            return Err(LocalFieldError::NotUnit);
        }
        Ok(KElement {
            field,
            val,
            prec,
            unit,
        })
    }

    /// `π^val · u` from unit coordinates.
    pub fn from_coords(
        field: LocalFieldSpec,
        val: i64,
        prec: u32,
        unit: &[u64],
    ) -> Result<Self, LocalFieldError> {
        let r = quot_ring(field, prec)?;
        KElement::new(field, val, prec, r.from_coords(unit)?)
    }

    pub fn one(field: LocalFieldSpec, prec: u32) -> Result<Self, LocalFieldError> {
        Self::pi_power(field, 0, prec)
    }

    pub fn pi_power(field: LocalFieldSpec, k: i64, prec: u32) -> Result<Self, LocalFieldError> {
        let r = quot_ring(field, prec)?;
        Ok(KElement {
            field,
            val: k,
            prec,
            unit: r.one(),
        })
    }

    /// A nonzero integer viewed in `K` (for laurent fields, its residue in `F_p`).
    pub fn from_int(field: LocalFieldSpec, v: i64, prec: u32) -> Result<Self, LocalFieldError> {
        let p = field.p() as i64;
        let (mut v, mut val) = (v, 0i64);
        if v == 0 {
            return Err(LocalFieldError::NotUnit);
        }
        match field.kind() {
            FieldKind::Padic => {
                while v % p == 0 {
                    v /= p;
                    val += 1;
                }
            }
            FieldKind::Laurent => {
                if v % p == 0 {
                    return Err(LocalFieldError::NotUnit);
                }
            }
        }
        let r = quot_ring(field, prec)?;
        Ok(KElement {
            field,
            val,
            prec,
            unit: r.from_int(v),
        })
    }

    /// `π^val · u` from a unit of some quotient ring.
    pub fn from_unit(
        field: LocalFieldSpec,
        val: i64,
        unit: RingElem,
        prec: u32,
    ) -> Result<Self, LocalFieldError> {
        KElement::new(field, val, prec, unit)
    }

    pub fn field(&self) -> LocalFieldSpec {
        self.field
    }

    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// `x` is known modulo `π^{abs_precision}`.
    pub fn abs_precision(&self) -> i64 {
        self.val + self.prec as i64
    }

    pub fn unit(&self) -> &RingElem {
        &self.unit
    }

    /// The same element at a lower unit precision.
    pub fn reduce(&self, prec: u32) -> Result<Self, LocalFieldError> {
        if prec > self.prec {
            return Err(LocalFieldError::InsufficientPrecision {
                needed: prec as i64,
                have: self.prec as i64,
            });
        }
        let r = quot_ring(self.field, prec)?;
        Ok(KElement {
            field: self.field,
            val: self.val,
            prec,
            unit: r.reduce_coords(self.unit.coords()),
        })
    }

    pub fn to_repr(&self) -> KElementRepr {
        KElementRepr {
            val: self.val,
            prec: self.prec,
            unit: self.unit.coords().to_vec(),
        }
    }

    pub fn from_repr(field: LocalFieldSpec, r: &KElementRepr) -> Result<Self, LocalFieldError> {
        KElement::from_coords(field, r.val, r.prec, &r.unit)
    }
}

fn check_field(a: &KElement, b: &KElement) -> Result<(), LocalFieldError> {
    if a.field != b.field {
        return Err(LocalFieldError::FieldMismatch(a.field, b.field));
    }
    Ok(())
}

/// Product; the result carries the smaller of the two unit precisions.
pub fn k_mul(a: &KElement, b: &KElement) -> Result<KElement, LocalFieldError> {
    check_field(a, b)?;
    let prec = a.prec.min(b.prec);
    let r = quot_ring(a.field, prec)?;
    let ua = r.reduce_coords(a.unit.coords());
    let ub = r.reduce_coords(b.unit.coords());
    Ok(KElement {
        field: a.field,
        val: a.val + b.val,
        prec,
        unit: r.mul(&ua, &ub),
    })
}

pub fn k_inv(a: &KElement) -> Result<KElement, LocalFieldError> {
    let r = quot_ring(a.field, a.prec)?;
    let inv = r.inv(&a.unit).ok_or(LocalFieldError::NotUnit)?;
    Ok(KElement {
        field: a.field,
        val: -a.val,
        prec: a.prec,
        unit: inv,
    })
}

/// Sum at the best precision both summands support. Fails with
/// [`LocalFieldError::Cancelled`] when the sum is zero at that precision.
pub fn k_add(a: &KElement, b: &KElement) -> Result<KElement, LocalFieldError> {
    check_field(a, b)?;
    let v = a.val.min(b.val);
    let abs = a.abs_precision().min(b.abs_precision());
    let rel = (abs - v) as u32;
    let r = quot_ring(a.field, rel)?;
    let shifted =
        |x: &KElement| r.mul_pi_pow(&r.reduce_coords(x.unit.coords()), (x.val - v) as u32);
    let s = r.add(&shifted(a), &shifted(b));
    let w = r
        .valuation(&s)
        .ok_or(LocalFieldError::Cancelled { abs_prec: abs })?;
    let prec = rel - w;
    let unit = quot_ring(a.field, prec)?.reduce_coords(&r.div_pi_pow_coords(&s, w));
    Ok(KElement {
        field: a.field,
        val: v + w as i64,
        prec,
        unit,
    })
}

impl KElement {
    /// `-x`.
    pub fn neg(&self) -> KElement {
        let r = quot_ring(self.field, self.prec).expect("existing precision");
        KElement {
            field: self.field,
            val: self.val,
            prec: self.prec,
            unit: r.neg(&self.unit),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3() -> LocalFieldSpec {
        LocalFieldSpec::padic(3, 1).unwrap()
    }

    #[test]
    fn valuations_add() {
        let a = KElement::pi_power(q3(), 1, 2).unwrap();
        let b = KElement::pi_power(q3(), -1, 2).unwrap();
        assert_eq!(k_mul(&a, &b).unwrap(), KElement::one(q3(), 2).unwrap());
    }

    #[test]
    fn inverse_negates_valuation() {
        let u = KElement::from_coords(q3(), 2, 2, &[2]).unwrap();
        let inv = k_inv(&u).unwrap();
        assert_eq!(inv.valuation(), -2);
        assert_eq!(inv.unit().coords(), &[5]);
    }

    #[test]
    fn units_multiply_mod_9() {
        let a = KElement::from_int(q3(), 2, 2).unwrap();
        let b = KElement::from_int(q3(), 5, 2).unwrap();
        assert_eq!(k_mul(&a, &b).unwrap(), KElement::one(q3(), 2).unwrap());
    }

    #[test]
    fn from_int_extracts_valuation() {
        let x = KElement::from_int(q3(), 18, 2).unwrap();
        assert_eq!((x.valuation(), x.unit().coords()), (2, &[2u64][..]));
        assert!(KElement::from_int(LocalFieldSpec::laurent(3, 1).unwrap(), 3, 1).is_err());
        assert!(KElement::from_int(q3(), 0, 1).is_err());
    }

    #[test]
    fn addition_tracks_precision() {
        // 1/9 + 1/3 = 4/9
        let a = KElement::pi_power(q3(), -2, 3).unwrap();
        let b = KElement::pi_power(q3(), -1, 3).unwrap();
        let s = k_add(&a, &b).unwrap();
        assert_eq!(
            (s.valuation(), s.precision(), s.unit().coords()),
            (-2, 3, &[4u64][..])
        );
        // 1 + 2 = 3 loses one digit of unit precision
        let one = KElement::from_int(q3(), 1, 2).unwrap();
        let two = KElement::from_int(q3(), 2, 2).unwrap();
        let t = k_add(&one, &two).unwrap();
        assert_eq!((t.valuation(), t.precision()), (1, 1));
        let c = k_add(&one, &one.neg());
        assert_eq!(c, Err(LocalFieldError::Cancelled { abs_prec: 2 }));
    }
}
