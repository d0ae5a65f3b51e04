//! Virtual representations as ℤ-combinations of monomial atoms
//! `Ind_{L/K} χ` with `L/K` unramified.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chars::{CharError, MulChar, MulCharRepr};
use crate::coeff::{CycNum, RootOfUnity};
use crate::localfield::{KElement, LocalFieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VirtualRepError {
    #[error(transparent)]
    Char(#[from] CharError),
    #[error("{top} is not an unramified extension of {base}")]
    NotUnramified {
        base: LocalFieldSpec,
        top: LocalFieldSpec,
    },
    #[error("terms live over different base fields")]
    BaseMismatch,
    #[error("operation needs base-field atoms only")]
    InducedAtom,
    #[error("twisting character must be unramified")]
    RamifiedTwist,
    #[error("coefficient field characteristic must differ from p")]
    BadCharacteristic,
}

/// `Ind_{L/K} χ` for `L/K` unramified of degree `f'`; `f' = 1` is a
/// character of `K^×`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    base: LocalFieldSpec,
    fprime: usize,
    chi: MulChar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRepr {
    pub f: usize,
    #[serde(rename = "char")]
    pub chi: MulCharRepr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRepr {
    pub coef: i64,
    pub atom: AtomRepr,
}

impl Atom {
    pub fn base(chi: MulChar) -> Atom {
        Atom {
            base: chi.field(),
            fprime: 1,
            chi,
        }
    }

    pub fn induced(base: LocalFieldSpec, chi: MulChar) -> Result<Atom, VirtualRepError> {
        let top = chi.field();
        if !top.is_extension_of(&base) {
            return Err(VirtualRepError::NotUnramified { base, top });
        }
        Ok(Atom {
            base,
            fprime: top.f() / base.f(),
            chi,
        })
    }

    pub fn base_field(&self) -> LocalFieldSpec {
        self.base
    }

    pub fn ext_degree(&self) -> usize {
        self.fprime
    }

    pub fn character(&self) -> &MulChar {
        &self.chi
    }

    pub fn rank(&self) -> i64 {
        self.fprime as i64
    }

    pub fn swan(&self) -> i64 {
        self.fprime as i64 * self.chi.swan() as i64
    }

    /// `rk V^I`: the inertia acts through the conjugates of `χ`, so the
    /// invariants are everything or nothing.
    pub fn inertia_invariants_rank(&self) -> i64 {
        if self.chi.is_unramified() {
            self.fprime as i64
        } else {
            0
        }
    }

    /// `det(-Frob | V^I)`: `-χ(π_L)` for unramified `χ`, since `Frob` acts on
    /// `Ind χ` with characteristic polynomial `X^{f'} - χ(π_L)`; empty otherwise.
    pub fn det_minus_frob_invariants(&self) -> CycNum {
        if self.chi.is_unramified() {
            -self.chi.pi_value()
        } else {
            CycNum::one(self.base.p())
        }
    }

    /// `(Ind χ) ⊗ θ = Ind (χ · θ∘N_{L/K})`.
    pub fn twist(&self, theta: &MulChar) -> Result<Atom, VirtualRepError> {
        if !theta.is_unramified() {
            return Err(VirtualRepError::RamifiedTwist);
        }
        let theta_l = theta.norm_inflate(self.chi.field())?;
        Ok(Atom {
            base: self.base,
            fprime: self.fprime,
            chi: self.chi.mul(&theta_l)?,
        })
    }

    pub fn to_repr(&self) -> AtomRepr {
        AtomRepr {
            f: self.fprime,
            chi: self.chi.to_repr(),
        }
    }

    pub fn from_repr(base: LocalFieldSpec, r: &AtomRepr) -> Result<Atom, VirtualRepError> {
        let chi = MulChar::from_repr(&r.chi)?;
        let atom = Atom::induced(base, chi)?;
        if atom.fprime != r.f {
            return Err(VirtualRepError::NotUnramified {
                base,
                top: atom.chi.field(),
            });
        }
        Ok(atom)
    }

    /// Merge key; distinct atoms have distinct keys.
    fn key(&self) -> String {
        serde_json::to_string(&self.to_repr()).expect("serializable")
    }
}

/// `Σ c_i [A_i]`, normalized: atoms merged, zero coefficients dropped,
/// terms sorted by atom key.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualRep {
    base: LocalFieldSpec,
    terms: Vec<(i64, Atom)>,
}

impl VirtualRep {
    pub fn zero(base: LocalFieldSpec) -> VirtualRep {
        VirtualRep {
            base,
            terms: Vec::new(),
        }
    }

    pub fn new(
        base: LocalFieldSpec,
        terms: Vec<(i64, Atom)>,
    ) -> Result<VirtualRep, VirtualRepError> {
        if terms.iter().any(|(_, a)| a.base != base) {
            return Err(VirtualRepError::BaseMismatch);
        }
        let mut keyed: Vec<(String, i64, Atom)> = Vec::new();
        for (c, a) in terms {
            let k = a.key();
            match keyed.iter_mut().find(|(kk, _, _)| *kk == k) {
                Some(entry) => entry.1 += c,
                None => keyed.push((k, c, a)),
            }
        }
        keyed.retain(|(_, c, _)| *c != 0);
        keyed.sort_by(|x, y| x.0.cmp(&y.0));
        Ok(VirtualRep {
            base,
            terms: keyed.into_iter().map(|(_, c, a)| (c, a)).collect(),
        })
    }

    pub fn atom(atom: Atom) -> VirtualRep {
        let base = atom.base;
        VirtualRep::new(base, vec![(1, atom)]).expect("single atom")
    }

    pub fn character(chi: MulChar) -> VirtualRep {
        VirtualRep::atom(Atom::base(chi))
    }

    pub fn base_field(&self) -> LocalFieldSpec {
        self.base
    }

    pub fn terms(&self) -> &[(i64, Atom)] {
        &self.terms
    }

    pub fn add(&self, other: &VirtualRep) -> Result<VirtualRep, VirtualRepError> {
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        VirtualRep::new(self.base, t)
    }

    pub fn scale(&self, k: i64) -> VirtualRep {
        let terms = self.terms.iter().map(|(c, a)| (c * k, a.clone())).collect();
        VirtualRep::new(self.base, terms).expect("same base")
    }

    pub fn neg(&self) -> VirtualRep {
        self.scale(-1)
    }

    pub fn sub(&self, other: &VirtualRep) -> Result<VirtualRep, VirtualRepError> {
        self.add(&other.neg())
    }

    pub fn rank(&self) -> i64 {
        self.terms.iter().map(|(c, a)| c * a.rank()).sum()
    }

    pub fn swan(&self) -> i64 {
        self.terms.iter().map(|(c, a)| c * a.swan()).sum()
    }

    pub fn is_base_only(&self) -> bool {
        self.terms.iter().all(|(_, a)| a.fprime == 1)
    }

    /// `(det V)(a) = Π χ_i(a)^{c_i}` for base-field atoms.
    pub fn det_at(&self, a: &KElement) -> Result<CycNum, VirtualRepError> {
        if !self.is_base_only() {
            return Err(VirtualRepError::InducedAtom);
        }
        let mut acc = CycNum::one(self.base.p());
        for (c, atom) in &self.terms {
            let v = atom.chi.eval(a)?;
            acc = &acc * &v.pow(*c).map_err(CharError::from)?;
        }
        Ok(acc)
    }

    /// `rk V^{I'}` for coefficients of characteristic `l` (0 or a prime
    /// other than `p`). Tame character values have order prime to `l`, so
    /// the answer does not depend on `l`.
    pub fn inertia_invariants_rank(&self, l: u64) -> Result<i64, VirtualRepError> {
        if l == self.base.p() {
            return Err(VirtualRepError::BadCharacteristic);
        }
        Ok(self
            .terms
            .iter()
            .map(|(c, a)| c * a.inertia_invariants_rank())
            .sum())
    }

    /// `V ⊗ θ` for an unramified `θ` on the base.
    pub fn twist(&self, theta: &MulChar) -> Result<VirtualRep, VirtualRepError> {
        let terms = self
            .terms
            .iter()
            .map(|(c, a)| Ok((*c, a.twist(theta)?)))
            .collect::<Result<Vec<_>, VirtualRepError>>()?;
        VirtualRep::new(self.base, terms)
    }

    pub fn to_repr(&self) -> Vec<TermRepr> {
        self.terms
            .iter()
            .map(|(c, a)| TermRepr {
                coef: *c,
                atom: a.to_repr(),
            })
            .collect()
    }

    pub fn from_repr(
        base: LocalFieldSpec,
        terms: &[TermRepr],
    ) -> Result<VirtualRep, VirtualRepError> {
        let t = terms
            .iter()
            .map(|t| Ok((t.coef, Atom::from_repr(base, &t.atom)?)))
            .collect::<Result<Vec<_>, VirtualRepError>>()?;
        VirtualRep::new(base, t)
    }
}

/// The `f'` unramified characters `η_j` of `K^×` with `η_j(π) = ζ_{f'}^j`.
pub fn unramified_roots(base: LocalFieldSpec, fprime: usize) -> Vec<MulChar> {
    (0..fprime)
        .map(|j| {
            let v = RootOfUnity::new(fprime as u64, j as i64).to_cyc(base.p());
            MulChar::unramified(base, v).expect("roots of unity are units")
        })
        .collect()
}

/// `Ind_{L/K}(χ₀ ∘ N) = Σ_j [χ₀ η_j]` for `L/K` unramified of degree `f'`.
pub fn decompose_galois_invariant_induction(
    base: LocalFieldSpec,
    fprime: usize,
    chi0: &MulChar,
) -> Result<VirtualRep, VirtualRepError> {
    if chi0.field() != base {
        return Err(VirtualRepError::BaseMismatch);
    }
    let terms = unramified_roots(base, fprime)
        .iter()
        .map(|eta| Ok((1, Atom::base(chi0.mul(eta)?))))
        .collect::<Result<Vec<_>, VirtualRepError>>()?;
    VirtualRep::new(base, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3() -> LocalFieldSpec {
        LocalFieldSpec::padic(3, 1).unwrap()
    }

    fn quadratic() -> MulChar {
        MulChar::new(q3(), 1, CycNum::one(3), vec![1]).unwrap()
    }

    #[test]
    fn rank_and_swan() {
        let v = VirtualRep::character(quadratic())
            .sub(&VirtualRep::character(MulChar::trivial(q3())))
            .unwrap();
        assert_eq!(v.rank(), 0);
        assert_eq!(v.swan(), 0);
        let l = q3().extension(2).unwrap();
        let chi_l = MulChar::family(l, 2, &CycNum::one(3), true, 1000)
            .unwrap()
            .remove(0);
        assert_eq!(chi_l.swan(), 1);
        let a = VirtualRep::atom(Atom::induced(q3(), chi_l).unwrap());
        assert_eq!((a.rank(), a.swan()), (2, 2));
        let s = a.add(&v).unwrap();
        assert_eq!(s.swan(), a.swan() + v.swan());
    }

    #[test]
    fn normalization_merges_and_cancels() {
        let chi = VirtualRep::character(quadratic());
        assert_eq!(chi.sub(&chi).unwrap(), VirtualRep::zero(q3()));
        let two = chi.add(&chi).unwrap();
        assert_eq!(two.terms().len(), 1);
        assert_eq!(two.terms()[0].0, 2);
    }

    #[test]
    fn determinants() {
        let chi = quadratic();
        let v = VirtualRep::character(chi.clone());
        let pi = KElement::pi_power(q3(), 1, 1).unwrap();
        assert_eq!(v.det_at(&pi).unwrap(), CycNum::one(3));
        let w = v.add(&VirtualRep::character(chi.inv().unwrap())).unwrap();
        let two = KElement::from_int(q3(), 2, 1).unwrap();
        assert_eq!(w.det_at(&two).unwrap(), CycNum::one(3));
        assert_eq!(v.scale(2).det_at(&two).unwrap(), CycNum::one(3));
        assert_eq!(v.det_at(&two).unwrap(), CycNum::from_int(3, -1));
    }

    #[test]
    fn inertia_invariants() {
        let theta = MulChar::unramified(q3(), CycNum::from_int(3, 5).pow(0).unwrap()).unwrap();
        let t = VirtualRep::character(theta);
        let r = VirtualRep::character(quadratic());
        assert_eq!(t.inertia_invariants_rank(0).unwrap(), 1);
        assert_eq!(r.inertia_invariants_rank(7).unwrap(), 0);
        assert_eq!(t.sub(&r).unwrap().inertia_invariants_rank(2).unwrap(), 1);
        assert!(t.inertia_invariants_rank(3).is_err());
    }

    #[test]
    fn decomposition_of_induced_trivial() {
        let v = decompose_galois_invariant_induction(q3(), 1, &quadratic()).unwrap();
        assert_eq!(v, VirtualRep::character(quadratic()));
        let w = decompose_galois_invariant_induction(q3(), 2, &MulChar::trivial(q3())).unwrap();
        assert_eq!(w.terms().len(), 2);
        let values: Vec<CycNum> = w
            .terms()
            .iter()
            .map(|(_, a)| a.character().pi_value().clone())
            .collect();
        assert!(values.contains(&CycNum::one(3)));
        assert!(values.contains(&CycNum::from_int(3, -1)));
        let u = decompose_galois_invariant_induction(q3(), 3, &quadratic()).unwrap();
        assert_eq!(u.terms().len(), 3);
        assert!(u
            .terms()
            .iter()
            .all(|(c, a)| *c == 1 && a.character().conductor() == 1));
    }

    #[test]
    fn swan_of_induced_matches_decomposition() {
        let k = LocalFieldSpec::padic(5, 1).unwrap();
        for chi0 in MulChar::family(k, 2, &CycNum::one(5), false, 100).unwrap() {
            for fp in [2usize, 3] {
                let l = k.extension(fp).unwrap();
                let ind = Atom::induced(k, chi0.norm_inflate(l).unwrap()).unwrap();
                let dec = decompose_galois_invariant_induction(k, fp, &chi0).unwrap();
                assert_eq!(ind.swan(), dec.swan());
                assert_eq!(ind.rank(), dec.rank());
            }
        }
    }

    #[test]
    fn rejects_bad_atoms() {
        let l5 = LocalFieldSpec::padic(5, 2).unwrap();
        let e = Atom::induced(q3(), MulChar::trivial(l5)).unwrap_err();
        assert!(matches!(e, VirtualRepError::NotUnramified { .. }));
        let l = q3().extension(2).unwrap();
        let ind = VirtualRep::atom(Atom::induced(q3(), MulChar::trivial(l)).unwrap());
        let pi = KElement::pi_power(q3(), 1, 1).unwrap();
        assert_eq!(ind.det_at(&pi), Err(VirtualRepError::InducedAtom));
    }

    #[test]
    fn json_terms_round_trip() {
        let l = q3().extension(2).unwrap();
        let v = VirtualRep::character(quadratic())
            .sub(&VirtualRep::atom(
                Atom::induced(q3(), MulChar::trivial(l)).unwrap(),
            ))
            .unwrap();
        let s = serde_json::to_string(&v.to_repr()).unwrap();
        let back: Vec<TermRepr> = serde_json::from_str(&s).unwrap();
        assert_eq!(VirtualRep::from_repr(q3(), &back).unwrap(), v);
    }
}
