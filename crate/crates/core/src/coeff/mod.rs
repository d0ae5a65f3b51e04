//! Exact arithmetic in `ℤ[1/p][ζ_N]` and in finite fields `F_{l^d}`.
//!
//! A [`CycNum`] is stored as an integer coefficient vector in the power basis
//! `1, ζ, …, ζ^{φ(N)-1}` together with a single power of the banned prime `p`
//! in the denominator. That is exactly the shape of an element of
//! `ℤ[1/p][ζ_N]`, so the denominator invariant holds by construction.

pub(crate) mod cyclo;
mod cycnum;
pub(crate) mod finfield;
pub(crate) mod fpoly;
mod root;

pub use cycnum::CycNum;
pub use finfield::{FinField, FinFieldElem};
pub use root::RootOfUnity;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("banned primes differ: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("denominator {den} is not a power of {p}")]
    BadDenominator { den: String, p: u64 },
    #[error("element is not a unit of Z[1/{0}][zeta]")]
    NotUnit(u64),
    #[error("level must be positive")]
    ZeroLevel,
    #[error("expected {expected} coefficients at level {level}, got {got}")]
    WrongLength {
        level: u64,
        expected: usize,
        got: usize,
    },
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("level {from} does not divide {to}")]
    LevelMismatch { from: u64, to: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("finite fields differ")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
}

/// `cyc_arith`: `op` applied after lifting both operands to the lcm level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn cyc_arith(a: &CycNum, b: &CycNum, op: ArithOp) -> Result<CycNum, CoeffError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
    }
}

pub fn cyc_norm(a: &CycNum) -> num_rational::BigRational {
    a.norm()
}

pub fn cyc_is_unit(a: &CycNum) -> bool {
    a.is_unit()
}

pub fn root_of_unity(order: u64, exponent: i64, p: u64) -> CycNum {
    CycNum::root_of_unity(order, exponent, p)
}
