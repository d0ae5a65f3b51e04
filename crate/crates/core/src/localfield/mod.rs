//! Nonarchimedean local fields through their finite quotients `𝒪_K/π^m`.
//!
//! Two kinds are supported: the unramified degree-`f` extension of `ℚ_p`
//! (uniformizer `p`) and `F_q((t))` (uniformizer `t`).

mod conway;
mod ext;
mod kelem;
mod ring;
mod units;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use ext::{unramified_ext, UnramifiedExt};
pub use kelem::{k_add, k_inv, k_mul, KElement, KElementRepr};
pub use ring::{quot_ring, QuotRing, RingElem};
pub use units::{unit_group, UnitGroupPresentation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalFieldError {
    #[error("cannot parse field descriptor: {0}")]
    Parse(String),
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("ring too large for enumeration: {0}")]
    TooLarge(String),
    #[error("fields differ: {0} vs {1}")]
    FieldMismatch(LocalFieldSpec, LocalFieldSpec),
    #[error("{top} is not an unramified extension of {base}")]
    NotUnramified {
        base: LocalFieldSpec,
        top: LocalFieldSpec,
    },
    #[error("precision mismatch: {0} vs {1}")]
    PrecisionMismatch(u32, u32),
    #[error("element is not a unit")]
    NotUnit,
    #[error("insufficient precision: need {needed}, have {have}")]
    InsufficientPrecision { needed: i64, have: i64 },
    #[error("sum vanishes modulo pi^{abs_prec}")]
    Cancelled { abs_prec: i64 },
    #[error("element does not lie in the base ring")]
    NotInBase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldKind {
    Padic,
    Laurent,
}

/// A local field `K`: its kind, residue characteristic `p` and residue
/// degree `f`, so `q = p^f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalFieldSpec {
    kind: FieldKind,
    p: u64,
    f: usize,
}

impl LocalFieldSpec {
    pub fn new(kind: FieldKind, p: u64, f: usize) -> Result<Self, LocalFieldError> {
        if !crate::coeff::fpoly::is_prime(p) {
            return Err(LocalFieldError::Parse(format!("p={p} is not prime")));
        }
        if f == 0 || f > 32 {
            return Err(LocalFieldError::Parse(format!(
                "residue degree f={f} out of range"
            )));
        }
        Ok(LocalFieldSpec { kind, p, f })
    }

    pub fn padic(p: u64, f: usize) -> Result<Self, LocalFieldError> {
        Self::new(FieldKind::Padic, p, f)
    }

    pub fn laurent(p: u64, f: usize) -> Result<Self, LocalFieldError> {
        Self::new(FieldKind::Laurent, p, f)
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f as u32)
    }

    /// The unramified extension of degree `fprime`.
    pub fn extension(&self, fprime: usize) -> Result<Self, LocalFieldError> {
        Self::new(self.kind, self.p, self.f * fprime)
    }

    /// Whether `self` is an unramified extension of `base`.
    pub fn is_extension_of(&self, base: &LocalFieldSpec) -> bool {
        self.kind == base.kind && self.p == base.p && self.f.is_multiple_of(base.f)
    }
}

impl fmt::Display for LocalFieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            FieldKind::Padic => "padic",
            FieldKind::Laurent => "laurent",
        };
        write!(f, "{kind}:p={},f={}", self.p, self.f)
    }
}

impl FromStr for LocalFieldSpec {
    type Err = LocalFieldError;

    /// Parses `padic:p=3,f=1` or `laurent:p=2,f=2`; `f` defaults to 1.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |why: &str| LocalFieldError::Parse(format!("{s:?}: {why}"));
        let (kind, rest) = s.trim().split_once(':').ok_or_else(|| err("missing ':'"))?;
        let kind = match kind.trim() {
            "padic" => FieldKind::Padic,
            "laurent" => FieldKind::Laurent,
            other => return Err(err(&format!("unknown kind {other:?}"))),
        };
        let mut p = None;
        let mut f = None;
        for part in rest.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| err("expected key=value"))?;
            let v: u64 = v.trim().parse().map_err(|_| err("bad number"))?;
            match k.trim() {
                "p" if p.is_none() => p = Some(v),
                "f" if f.is_none() => f = Some(v as usize),
                other => return Err(err(&format!("unexpected key {other:?}"))),
            }
        }
        let p = p.ok_or_else(|| err("missing p"))?;
        LocalFieldSpec::new(kind, p, f.unwrap_or(1)).map_err(|e| err(&e.to_string()))
    }
}

impl Serialize for LocalFieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LocalFieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_descriptors() {
        let k: LocalFieldSpec = "padic:p=3,f=1".parse().unwrap();
        assert_eq!((k.kind(), k.p(), k.f(), k.q()), (FieldKind::Padic, 3, 1, 3));
        let l: LocalFieldSpec = "laurent:p=2,f=2".parse().unwrap();
        assert_eq!(l.q(), 4);
        assert_eq!(l.to_string(), "laurent:p=2,f=2");
        assert_eq!("padic:p=5".parse::<LocalFieldSpec>().unwrap().f(), 1);
    }

    #[test]
    fn rejects_bad_descriptors() {
        for s in [
            "padic",
            "adic:p=3",
            "padic:p=4",
            "padic:p=3,f=0",
            "padic:p=3,g=1",
            "padic:p=x",
        ] {
            assert!(s.parse::<LocalFieldSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn extensions() {
        let k = LocalFieldSpec::padic(3, 1).unwrap();
        let l = k.extension(2).unwrap();
        assert!(l.is_extension_of(&k));
        assert!(!k.is_extension_of(&l));
        assert!(!LocalFieldSpec::laurent(3, 2).unwrap().is_extension_of(&k));
    }
}
