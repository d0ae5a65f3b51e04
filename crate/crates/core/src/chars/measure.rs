use serde::{Deserialize, Serialize};

use crate::coeff::CycNum;
use crate::localfield::LocalFieldSpec;

use super::{AddChar, CharError};

/// A Haar measure, determined by `∫_𝒪 dx`, which must be a unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarMeasure {
    vol: CycNum,
}

impl HaarMeasure {
    pub fn new(vol: CycNum) -> Result<Self, CharError> {
        if !vol.is_unit() {
            return Err(CharError::VolumeNotUnit);
        }
        Ok(HaarMeasure { vol })
    }

    /// The measure with `∫_𝒪 dx = 1`.
    pub fn standard(field: LocalFieldSpec) -> Self {
        HaarMeasure {
            vol: CycNum::one(field.p()),
        }
    }

    pub fn volume(&self) -> &CycNum {
        &self.vol
    }

    /// Volume of `π^v 𝒪`: `q^{-v} m₀`.
    pub fn volume_of_ball(&self, field: LocalFieldSpec, v: i64) -> CycNum {
        &CycNum::p_power(field.p(), -v * field.f() as i64) * &self.vol
    }

    /// `a · dx`.
    pub fn scale(&self, a: &CycNum) -> Result<Self, CharError> {
        HaarMeasure::new(&self.vol * a)
    }
}

/// The measure self-dual to `dx` for `ψ`: `∫_𝒪 dx · ∫_𝒪 d̂x = q^{-n(ψ)}`.
pub fn dual_measure(dx: &HaarMeasure, psi: &AddChar) -> Result<HaarMeasure, CharError> {
    let field = psi.field();
    let q_pow = CycNum::p_power(field.p(), -psi.level() * field.f() as i64);
    HaarMeasure::new(&q_pow * &dx.vol.inverse()?)
}
