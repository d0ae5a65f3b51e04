//! The characters and measures that enter the local integrals.
//!
//! Conventions, fixed once here:
//!
//! * The standard additive character of a padic field is
//!   `ψ₀(x) = exp(2πi·{Tr x})`, with `Tr` the trace to `ℚ_p` and `{·}` the
//!   `p`-adic fractional part. On `F_q((t))` it is `ψ₀ = ζ_p^{tr(res x)}`,
//!   with `res` the coefficient of `t^{-1}`. Both have level 0. Other
//!   additive characters are twists `aψ₀: x ↦ ψ₀(ax)` and have level `v(a)`.
//! * Multiplicative characters are characters of `K^×`. A character is given
//!   by its value at the uniformizer (any unit of the coefficient ring) and
//!   by exponents `e_i` on the library-chosen generators `g_i` of
//!   `(𝒪_K/π^a)^×`, meaning `χ(g_i) = ζ_{d_i}^{e_i}` with `d_i` the order of
//!   `g_i`.

mod additive;
mod measure;
mod multiplicative;

use thiserror::Error;

use crate::coeff::CoeffError;
use crate::localfield::{LocalFieldError, LocalFieldSpec};

pub use additive::{addchar_standard, AddChar};
pub(crate) use additive::{psi0_shell_from_trace, psi0_shell_order};
pub use measure::{dual_measure, HaarMeasure};
pub use multiplicative::{MulChar, MulCharRepr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharError {
    #[error(transparent)]
    Field(#[from] LocalFieldError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("characters live on different fields: {0} vs {1}")]
    FieldMismatch(LocalFieldSpec, LocalFieldSpec),
    #[error("expected {expected} unit exponents, got {got}")]
    ExponentCount { expected: usize, got: usize },
    #[error("character is trivial on 1+pi^{0}; conductor is not minimal")]
    NotMinimal(u32),
    #[error("value at the uniformizer is not a unit")]
    PiValueNotUnit,
    #[error("measure volume is not a unit")]
    VolumeNotUnit,
    #[error("the character is not unramified")]
    Ramified,
    #[error("character family of size {size} exceeds the cap {cap}")]
    FamilyTooLarge { size: u128, cap: u128 },
}
