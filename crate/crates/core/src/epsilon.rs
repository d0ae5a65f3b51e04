//! `ε₀` of characters and virtual representations.
//!
//! For a character `χ` of conductor exponent `a`, level `n = n(ψ)` and
//! `v = Sw(χ) + n + 1`,
//!
//! ```text
//! ε₀(χ, ψ, dx) = ∫_{π^{-v} 𝒪^×} χ^{-1}(x) ψ(x) dx
//!              = m₀ q^{v-M} χ(π)^v Σ_{u ∈ (𝒪/π^M)^×} χ(u)^{-1} ψ(π^{-v} u),
//! ```
//!
//! `M = max(a, 1)`. The integrand is constant on cosets of `1 + π^M 𝒪`,
//! so the sum is exact. Each term is a root of unity of order dividing
//! `N = lcm(E, P)`; the sum is accumulated as a count per exponent and turned
//! into a cyclotomic number once.

use std::sync::Arc;

use num_integer::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::chars::{
    psi0_shell_from_trace, psi0_shell_order, AddChar, CharError, HaarMeasure, MulChar,
};
use crate::coeff::{CoeffError, CycNum};
use crate::localfield::{
    quot_ring, unit_group, KElement, LocalFieldError, LocalFieldSpec, RingElem,
};
use crate::virtualrep::{unramified_roots, Atom, VirtualRep, VirtualRepError};

/// Unit groups at least this large are summed in parallel.
const PAR_THRESHOLD: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpsilonError {
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Field(#[from] LocalFieldError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    VirtualRep(#[from] VirtualRepError),
    #[error("fields differ: {0} vs {1}")]
    FieldMismatch(LocalFieldSpec, LocalFieldSpec),
    #[error("epsilon factor {0} is not a unit of Z[1/p][zeta]")]
    NotUnit(String),
    #[error("gamma must have valuation {expected}, got {got}")]
    BadGamma { expected: i64, got: i64 },
    #[error("twisting representation must be a sum of unramified base characters")]
    RamifiedTwist,
}

/// The Gauss sum of one character, before summation: `ε₀ = prefactor ·
/// Σ_e counts[e] ζ_N^e`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussData {
    pub level: u64,
    pub counts: Vec<i64>,
    pub prefactor: CycNum,
    pub p: u64,
}

impl GaussData {
    pub fn value(&self) -> CycNum {
        &self.prefactor * &CycNum::from_counts(self.level, self.p, &self.counts)
    }
}

fn check_fields(chi: &MulChar, psi: &AddChar) -> Result<(), EpsilonError> {
    if chi.field() != psi.field() {
        return Err(EpsilonError::FieldMismatch(chi.field(), psi.field()));
    }
    Ok(())
}

/// `v = Sw(χ) + n(ψ) + 1`, the valuation of `γ` in the integral.
pub fn gamma_valuation(chi: &MulChar, psi: &AddChar) -> i64 {
    chi.swan() as i64 + psi.level() + 1
}

/// Gauss-sum data, integrating over `x = π^{-v} w^{-1} u` with `w` a unit
/// (`w = 1` by default). Every choice of `w` parametrizes the same domain.
pub fn gauss_data(
    chi: &MulChar,
    psi: &AddChar,
    dx: &HaarMeasure,
    w: Option<&RingElem>,
) -> Result<GaussData, EpsilonError> {
    check_fields(chi, psi)?;
    let field = chi.field();
    let p = field.p();
    let a = chi.conductor();
    let m = a.max(1);
    let v = gamma_valuation(chi, psi);
    debug_assert_eq!(chi.swan() + 1, m);

    let units = unit_group(field, m)?;
    let ring = units.ring().clone();
    if let Some(g) = chi.unit_group() {
        debug_assert!(Arc::ptr_eq(g, &units));
    }
    let mut tw = psi.twist_unit(m)?;
    let mut shift = 0u64;
    let e = chi.unit_value_order();
    let pp = psi0_shell_order(field, m);
    let n = e.lcm(&pp);
    if let Some(w) = w {
        let w = ring.reduce_coords(w.coords());
        let winv = ring.inv(&w).ok_or(LocalFieldError::NotUnit)?;
        tw = ring.mul(&tw, &winv);
        shift = chi
            .eval_unit_root(&w)?
            .exponent_at(e)
            .expect("order divides E");
    }

    // Tr(tw · u) = Σ u_i Tr(tw · y^i) on the power basis.
    let f = field.f();
    let basis_traces: Vec<u64> = (0..f)
        .map(|i| {
            let mut c = vec![0u64; f];
            c[i] = 1;
            let y = ring.from_coords(&c).expect("basis vector");
            ring.trace_to_prime(&ring.mul(&tw, &y))
        })
        .collect();
    let (ce, cp) = (n / e, n / pp);

    let term = |pos: usize| -> usize {
        let u = units.unit_at(pos);
        let tr = u
            .coords()
            .iter()
            .zip(&basis_traces)
            .fold(0u64, |acc, (&ui, &ti)| ring.a_add(acc, ring.a_mul(ui, ti)));
        let s = psi0_shell_from_trace(&ring, tr);
        debug_assert_eq!(s.order(), pp);
        let c = if a == 0 { 0 } else { chi.unit_exponent_at(pos) };
        let idx =
            (s.exp() as u128 * cp as u128 + (shift + (e - c) % e) as u128 * ce as u128) % n as u128;
        idx as usize
    };

    let order = units.order();
    let counts = if order >= PAR_THRESHOLD {
        (0..order)
            .into_par_iter()
            .fold(
                || vec![0i64; n as usize],
                |mut acc, pos| {
                    acc[term(pos)] += 1;
                    acc
                },
            )
            .reduce(
                || vec![0i64; n as usize],
                |mut x, y| {
                    x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
                    x
                },
            )
    } else {
        let mut acc = vec![0i64; n as usize];
        for pos in 0..order {
            acc[term(pos)] += 1;
        }
        acc
    };

    let q_pow = CycNum::p_power(p, (v - m as i64) * f as i64);
    let prefactor = &(&q_pow * dx.volume()) * &chi.pi_value().pow(v)?;
    Ok(GaussData {
        level: n,
        counts,
        prefactor,
        p,
    })
}

fn certify(e: CycNum) -> Result<CycNum, EpsilonError> {
    if e.is_unit() {
        Ok(e.descend())
    } else {
        Err(EpsilonError::NotUnit(e.to_string()))
    }
}

/// `ε₀(χ, ψ, dx)`, certified to be a unit.
pub fn epsilon0_char(
    chi: &MulChar,
    psi: &AddChar,
    dx: &HaarMeasure,
) -> Result<CycNum, EpsilonError> {
    certify(gauss_data(chi, psi, dx, None)?.value())
}

/// `ε₀(χ, ψ, dx)` computed with an explicit `γ` of valuation
/// `Sw(χ) + n(ψ) + 1`.
pub fn epsilon0_char_with_gamma(
    chi: &MulChar,
    psi: &AddChar,
    dx: &HaarMeasure,
    gamma: &KElement,
) -> Result<CycNum, EpsilonError> {
    check_fields(chi, psi)?;
    let v = gamma_valuation(chi, psi);
    if gamma.valuation() != v {
        return Err(EpsilonError::BadGamma {
            expected: v,
            got: gamma.valuation(),
        });
    }
    let m = chi.conductor().max(1);
    if gamma.precision() < m {
        return Err(LocalFieldError::InsufficientPrecision {
            needed: m as i64,
            have: gamma.precision() as i64,
        }
        .into());
    }
    let w = quot_ring(chi.field(), m)?.reduce_coords(gamma.unit().coords());
    certify(gauss_data(chi, psi, dx, Some(&w))?.value())
}

/// `-θ(π)^{n+1} q^n m₀` for unramified `θ`.
pub fn epsilon0_unramified(
    theta: &MulChar,
    psi: &AddChar,
    dx: &HaarMeasure,
) -> Result<CycNum, EpsilonError> {
    check_fields(theta, psi)?;
    if !theta.is_unramified() {
        return Err(CharError::Ramified.into());
    }
    let field = theta.field();
    let n = psi.level();
    let q_pow = CycNum::p_power(field.p(), n * field.f() as i64);
    let val = &(&q_pow * dx.volume()) * &theta.pi_value().pow(n + 1)?;
    Ok(-&val)
}

/// `ε₀(Ind_{L/K} χ, ψ, dx)` through inductivity in degree 0:
/// `ε₀(χ, ψ_L) ε₀(1_L, ψ_L)^{-1} Π_j ε₀(η_j, ψ, dx)`, with `ψ_L = ψ ∘ Tr`
/// and `η_j` the unramified characters of order dividing `f'`.
pub fn epsilon0_atom(atom: &Atom, psi: &AddChar, dx: &HaarMeasure) -> Result<CycNum, EpsilonError> {
    let base = atom.base_field();
    if psi.field() != base {
        return Err(EpsilonError::FieldMismatch(base, psi.field()));
    }
    if atom.ext_degree() == 1 {
        return epsilon0_char(atom.character(), psi, dx);
    }
    let top = atom.character().field();
    let psi_l = psi.compose_trace(top)?;
    let dx_l = HaarMeasure::standard(top);
    let num = epsilon0_char(atom.character(), &psi_l, &dx_l)?;
    let den = epsilon0_char(&MulChar::trivial(top), &psi_l, &dx_l)?;
    let mut acc = num.try_div(&den)?;
    for eta in unramified_roots(base, atom.ext_degree()) {
        acc = &acc * &epsilon0_char(&eta, psi, dx)?;
    }
    certify(acc)
}

/// `Π ε₀(A_i)^{c_i}`.
pub fn epsilon0_virtual(
    v: &VirtualRep,
    psi: &AddChar,
    dx: &HaarMeasure,
) -> Result<CycNum, EpsilonError> {
    let mut acc = CycNum::one(v.base_field().p());
    for (c, atom) in v.terms() {
        acc = &acc * &epsilon0_atom(atom, psi, dx)?.pow(*c)?;
    }
    certify(acc)
}

/// `ε₀(V ⊗ θ) = θ(π)^{Sw V + rk V·(n+1)} ε₀(V)` for unramified `θ`.
pub fn epsilon0_twist_formula(
    v: &VirtualRep,
    theta: &MulChar,
    psi: &AddChar,
    dx: &HaarMeasure,
) -> Result<CycNum, EpsilonError> {
    if !theta.is_unramified() {
        return Err(EpsilonError::RamifiedTwist);
    }
    let k = v.swan() + v.rank() * (psi.level() + 1);
    Ok(&theta.pi_value().pow(k)? * &epsilon0_virtual(v, psi, dx)?)
}

/// `ε₀(V ⊗ W) = det W(π)^{Sw V + rk V·(n+1)} ε₀(V)^{rk W}` for `W` a
/// combination of unramified base characters.
pub fn epsilon0_twist_by_unramified(
    v: &VirtualRep,
    w: &VirtualRep,
    psi: &AddChar,
    dx: &HaarMeasure,
) -> Result<CycNum, EpsilonError> {
    let unramified = w
        .terms()
        .iter()
        .all(|(_, a)| a.ext_degree() == 1 && a.character().is_unramified());
    if !unramified {
        return Err(EpsilonError::RamifiedTwist);
    }
    let pi = KElement::pi_power(w.base_field(), 1, 1)?;
    let det_w = w.det_at(&pi)?;
    let k = v.swan() + v.rank() * (psi.level() + 1);
    Ok(&det_w.pow(k)? * &epsilon0_virtual(v, psi, dx)?.pow(w.rank())?)
}

/// `V ⊗ W` by twisting each atom of `V` by each character of `W`.
pub fn tensor_unramified(v: &VirtualRep, w: &VirtualRep) -> Result<VirtualRep, EpsilonError> {
    let mut acc = VirtualRep::zero(v.base_field());
    for (c, a) in w.terms() {
        if a.ext_degree() != 1 || !a.character().is_unramified() {
            return Err(EpsilonError::RamifiedTwist);
        }
        acc = acc.add(&v.twist(a.character())?.scale(*c))?;
    }
    Ok(acc)
}

/// `det(-Frob | V^I)`, multiplied over the atoms.
pub fn det_minus_frob_invariants(v: &VirtualRep) -> Result<CycNum, EpsilonError> {
    let mut acc = CycNum::one(v.base_field().p());
    for (c, atom) in v.terms() {
        acc = &acc * &atom.det_minus_frob_invariants().pow(*c)?;
    }
    Ok(acc)
}

/// `ε(V, ψ, dx) = ε₀(V, ψ, dx) / det(-Frob | V^I)`.
pub fn epsilon_full(
    v: &VirtualRep,
    psi: &AddChar,
    dx: &HaarMeasure,
) -> Result<CycNum, EpsilonError> {
    let e0 = epsilon0_virtual(v, psi, dx)?;
    Ok(e0.try_div(&det_minus_frob_invariants(v)?)?)
}

/// `ε₀(χ, ψ, dx) · ε₀(χ^{-1}|·|, -ψ, d̂x) = q^{-rk χ^I}`.
pub fn explicit_inverse_check(
    chi: &MulChar,
    psi: &AddChar,
    dx: &HaarMeasure,
) -> Result<bool, EpsilonError> {
    let field = chi.field();
    let e1 = epsilon0_char(chi, psi, dx)?;
    let chi2 = chi.inv()?.abs_twist()?;
    let dual = crate::chars::dual_measure(dx, psi)?;
    let e2 = epsilon0_char(&chi2, &psi.neg(), &dual)?;
    let rk = if chi.is_unramified() { 1 } else { 0 };
    Ok(&e1 * &e2 == CycNum::p_power(field.p(), -rk * field.f() as i64))
}
