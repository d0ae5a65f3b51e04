//! Exact local epsilon factors of characters and virtual representations of
//! local fields, with values in `ℤ[1/p][ζ_N]`.

pub mod abelian;
pub mod chars;
pub mod coeff;
pub mod epsilon;
pub mod localfield;
pub mod reduce;
pub mod swan;
pub mod verify;
pub mod virtualrep;

pub use chars::{
    addchar_standard, dual_measure, AddChar, CharError, HaarMeasure, MulChar, MulCharRepr,
};
pub use coeff::{CoeffError, CycNum, FinField, FinFieldElem, RootOfUnity};
pub use epsilon::{
    epsilon0_atom, epsilon0_char, epsilon0_char_with_gamma, epsilon0_twist_by_unramified,
    epsilon0_twist_formula, epsilon0_unramified, epsilon0_virtual, epsilon_full,
    explicit_inverse_check, EpsilonError,
};
pub use localfield::{
    unit_group, FieldKind, KElement, KElementRepr, LocalFieldError, LocalFieldSpec,
    UnitGroupPresentation,
};
pub use reduce::{epsilon0_mod_l, gauss_level, ReduceError, ReductionMap};
pub use swan::{
    artin_character, builtin_cyclotomic_filtration, conductor_pairing, swan_character,
    swan_pairing, ClassFunction, FiltrationFixture, FiniteGroupData, RamFiltration, SwanError,
};
pub use verify::{run_suite, Suite, SuiteReport};
pub use virtualrep::{Atom, VirtualRep, VirtualRepError};
