//! Seeded verification suites. Cases are generated sequentially from the
//! seed, evaluated in parallel, and reported in generation order.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chars::{addchar_standard, AddChar, HaarMeasure, MulChar};
use crate::coeff::{CycNum, RootOfUnity};
use crate::epsilon::{
    epsilon0_char, epsilon0_twist_formula, epsilon0_virtual, explicit_inverse_check,
};
use crate::localfield::{unit_group, KElement, LocalFieldSpec};
use crate::reduce::{epsilon0_mod_l, gauss_level, ReductionMap};
use crate::swan::{
    artin_character, builtin_cyclotomic_filtration, conductor_pairing, cyclotomic_transfer,
    inflate, pair_with_character, swan_character, swan_pairing, RamFiltration,
};
use crate::virtualrep::{decompose_galois_invariant_induction, Atom, VirtualRep};

/// Primes used for reduction checks.
pub const REDUCTION_PRIMES: [u64; 5] = [2, 5, 7, 11, 13];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Formulary,
    Induction,
    Reduction,
    Swan,
    Units,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Formulary,
        Suite::Induction,
        Suite::Reduction,
        Suite::Swan,
        Suite::Units,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Formulary => "formulary",
            Suite::Induction => "induction",
            Suite::Reduction => "reduction",
            Suite::Swan => "swan",
            Suite::Units => "units",
        };
        f.write_str(s)
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Every `ε₀` computed by the case.
    #[serde(skip)]
    pub epsilons: Vec<CycNum>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub total: usize,
    pub failed: usize,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

/// A failure message, if any, and the `ε₀` values computed.
pub type Outcome = (Option<String>, Vec<CycNum>);

type Check = Box<dyn Fn() -> Result<Outcome, String> + Send + Sync>;

struct Case {
    name: String,
    check: Check,
}

fn case(name: String, f: impl Fn() -> Result<Outcome, String> + Send + Sync + 'static) -> Case {
    Case {
        name,
        check: Box::new(f),
    }
}

fn run(suite: Suite, seed: u64, cases: Vec<Case>) -> SuiteReport {
    let cases: Vec<CaseResult> = cases
        .into_par_iter()
        .map(|c| match (c.check)() {
            Ok((detail, epsilons)) => CaseResult {
                name: c.name,
                passed: detail.is_none(),
                detail,
                epsilons,
            },
            Err(e) => CaseResult {
                name: c.name,
                passed: false,
                detail: Some(format!("error: {e}")),
                epsilons: Vec::new(),
            },
        })
        .collect();
    let failed = cases.iter().filter(|c| !c.passed).count();
    SuiteReport {
        suite,
        seed,
        total: cases.len(),
        failed,
        cases,
    }
}

/// First failing check of a list of labelled booleans.
fn first_failure(checks: &[(&str, bool)]) -> Option<String> {
    checks
        .iter()
        .find(|(_, ok)| !ok)
        .map(|(n, _)| format!("{n} failed"))
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `±p^k`.
pub fn is_signed_p_power(r: &BigRational, p: u64) -> bool {
    let pb = BigInt::from(p);
    let is_pow = |x: &BigInt| {
        let mut x = x.abs();
        while x > BigInt::one() && (&x % &pb) == BigInt::from(0) {
            x /= &pb;
        }
        x.is_one()
    };
    is_pow(r.numer()) && is_pow(r.denom())
}

/// A unit of `ℤ[1/p][ζ]` whose norm is `±p^k`.
pub fn is_certified_unit(x: &CycNum, p: u64) -> bool {
    x.p() == p && x.is_unit() && is_signed_p_power(&x.norm(), p)
}

/// `±p^j ζ_m^k (1 - ζ_p)^e`, a unit of `ℤ[1/p][ζ]`.
pub fn random_unit(rng: &mut impl Rng, p: u64) -> CycNum {
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let j = rng.gen_range(-2..=2);
    let m = [1u64, 2, 3, 4, 6, 8][rng.gen_range(0..6)];
    let k = rng.gen_range(0..m as i64);
    let e = rng.gen_range(-1..=2);
    let base = &CycNum::from_int(p, sign) * &CycNum::p_power(p, j);
    let root = CycNum::root_of_unity(m, k, p);
    let one_minus = &CycNum::one(p) - &CycNum::root_of_unity(p, 1, p);
    &(&base * &root) * &one_minus.pow(e).expect("unit")
}

fn random_root(rng: &mut impl Rng, p: u64) -> CycNum {
    let m = [1u64, 2, 3, 4, 5, 6][rng.gen_range(0..6)];
    RootOfUnity::new(m, rng.gen_range(0..m as i64)).to_cyc(p)
}

/// A random element `π^v u` with `u` a unit modulo `π^prec`.
pub fn random_kelement(rng: &mut impl Rng, field: LocalFieldSpec, v: i64, prec: u32) -> KElement {
    let base = field.p().pow(prec);
    loop {
        let coords: Vec<u64> = (0..field.f()).map(|_| rng.gen_range(0..base)).collect();
        if let Ok(x) = KElement::from_coords(field, v, prec, &coords) {
            return x;
        }
    }
}

/// A random character of conductor at most `amax`.
pub fn random_char(
    rng: &mut impl Rng,
    field: LocalFieldSpec,
    amax: u32,
    pi_value: CycNum,
) -> MulChar {
    let a = rng.gen_range(0..=amax);
    let orders: Vec<u64> = if a == 0 {
        Vec::new()
    } else {
        unit_group(field, a)
            .expect("small unit group")
            .orders()
            .to_vec()
    };
    let exps = orders.iter().map(|&d| rng.gen_range(0..d)).collect();
    MulChar::from_exponents(field, a, pi_value, exps).expect("valid exponents")
}

const TWIST_PREC: u32 = 8;

fn random_psi(
    rng: &mut impl Rng,
    field: LocalFieldSpec,
    levels: std::ops::RangeInclusive<i64>,
) -> AddChar {
    let n = rng.gen_range(levels);
    let twist = random_kelement(rng, field, n, TWIST_PREC);
    addchar_standard(field)
        .and_then(|psi| psi.scale(&twist))
        .expect("twist")
}

fn formulary_fields() -> Vec<(LocalFieldSpec, u32)> {
    let f = |s: &str| s.parse::<LocalFieldSpec>().unwrap();
    vec![
        (f("padic:p=3,f=1"), 3),
        (f("padic:p=5,f=1"), 3),
        (f("padic:p=7,f=1"), 2),
        (f("padic:p=3,f=2"), 2),
        (f("laurent:p=2,f=1"), 4),
        (f("laurent:p=2,f=2"), 3),
        (f("laurent:p=3,f=1"), 3),
    ]
}

/// Rank-1 formulary: additivity, measure scaling, change of `ψ`, unramified
/// twist and the explicit inverse relation.
pub fn formulary(seed: u64, count: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields = formulary_fields();
    let mut cases = Vec::new();
    for i in 0..count {
        let (field, amax) = fields[rng.gen_range(0..fields.len())];
        let p = field.p();
        let pv = random_unit(&mut rng, p);
        let chi = random_char(&mut rng, field, amax, pv);
        let pv = random_root(&mut rng, p);
        let chi2 = random_char(&mut rng, field, amax.min(2), pv);
        let psi = random_psi(&mut rng, field, -1..=2);
        let dx = HaarMeasure::new(random_unit(&mut rng, p)).expect("unit");
        let scale = random_unit(&mut rng, p);
        let bv = rng.gen_range(-2..=2);
        let b = random_kelement(&mut rng, field, bv, TWIST_PREC);
        let theta = MulChar::unramified(field, random_unit(&mut rng, p)).expect("unit");
        let name = format!("{i}:{field}:a={}", chi.conductor());
        cases.push(case(name, move || {
            let e = epsilon0_char(&chi, &psi, &dx).map_err(err)?;
            let e2 = epsilon0_char(&chi2, &psi, &dx).map_err(err)?;
            let sum = VirtualRep::character(chi.clone())
                .add(&VirtualRep::character(chi2.clone()))
                .map_err(err)?;
            let additive = epsilon0_virtual(&sum, &psi, &dx).map_err(err)? == &e * &e2;

            let scaled = epsilon0_char(&chi, &psi, &dx.scale(&scale).map_err(err)?).map_err(err)?;
            let scaling = scaled == &scale * &e;

            let psi_b = psi.scale(&b).map_err(err)?;
            let e_b = epsilon0_char(&chi, &psi_b, &dx).map_err(err)?;
            let abs_b = CycNum::p_power(p, b.valuation() * field.f() as i64);
            let ch_psi = e_b == &(&chi.eval(&b).map_err(err)? * &abs_b) * &e;

            let twisted = epsilon0_char(&chi.mul(&theta).map_err(err)?, &psi, &dx).map_err(err)?;
            let formula =
                epsilon0_twist_formula(&VirtualRep::character(chi.clone()), &theta, &psi, &dx)
                    .map_err(err)?;
            let sw = chi.swan() as i64 + psi.level() + 1;
            let unr_twist =
                twisted == formula && twisted == &theta.pi_value().pow(sw).map_err(err)? * &e;

            let expl_inv = explicit_inverse_check(&chi, &psi, &dx).map_err(err)?;
            let values = vec![e, e2, scaled, e_b, twisted];
            Ok((
                first_failure(&[
                    ("units", values.iter().all(|x| is_certified_unit(x, p))),
                    ("additivity", additive),
                    ("scaling", scaling),
                    ("ch-psi", ch_psi),
                    ("unr-twist", unr_twist),
                    ("expl-inv", expl_inv),
                ]),
                values,
            ))
        }));
    }
    run(Suite::Formulary, seed, cases)
}

/// `ε₀(Ind_{L/K}(χ₀∘N)) = Π_j ε₀(χ₀ η_j)` over `ℚ_3`, `ℚ_5`, `f' ∈ {2, 3}`.
pub fn induction(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for p in [3u64, 5] {
        let k = LocalFieldSpec::padic(p, 1).unwrap();
        for fp in [2usize, 3] {
            let per = if p == 3 { 4 } else { 3 };
            for j in 0..per {
                let pv = random_unit(&mut rng, p);
                let chi0 = random_char(&mut rng, k, 2, pv);
                let psi = random_psi(&mut rng, k, 0..=1);
                let dx = HaarMeasure::new(random_unit(&mut rng, p)).expect("unit");
                let name = format!("{k}:f'={fp}:{j}:a={}", chi0.conductor());
                cases.push(case(name, move || {
                    let l = k.extension(fp).map_err(err)?;
                    let chi_l = chi0.norm_inflate(l).map_err(err)?;
                    let ind = VirtualRep::atom(Atom::induced(k, chi_l).map_err(err)?);
                    let dec = decompose_galois_invariant_induction(k, fp, &chi0).map_err(err)?;
                    let lhs = epsilon0_virtual(&ind, &psi, &dx).map_err(err)?;
                    let rhs = epsilon0_virtual(&dec, &psi, &dx).map_err(err)?;
                    let swan = ind.swan() == dec.swan() && ind.rank() == dec.rank();
                    let units = is_certified_unit(&lhs, p) && is_certified_unit(&rhs, p);
                    Ok((
                        first_failure(&[
                            ("units", units),
                            ("identity", lhs == rhs),
                            ("swan", swan),
                        ]),
                        vec![lhs, rhs],
                    ))
                }));
            }
        }
    }
    run(Suite::Induction, seed, cases)
}

/// Reduction commutation for `l ∈ {2, 5, 7, 11, 13} ∖ {p}` on characters of
/// conductor at most 3 on `ℚ_3`, `ℚ_5`, `F_4((t))`.
pub fn reduction(seed: u64, per_field: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for s in ["padic:p=3,f=1", "padic:p=5,f=1", "laurent:p=2,f=2"] {
        let field: LocalFieldSpec = s.parse().unwrap();
        let p = field.p();
        for i in 0..per_field {
            let pv = random_root(&mut rng, p);
            let chi = random_char(&mut rng, field, 3, pv);
            let psi = random_psi(&mut rng, field, -1..=1);
            let dx = HaarMeasure::new(random_unit(&mut rng, p)).expect("unit");
            let name = format!("{field}:{i}:a={}", chi.conductor());
            cases.push(case(name, move || reduction_check(&chi, &psi, &dx)));
        }
    }
    run(Suite::Reduction, seed, cases)
}

/// `epsilon0_mod_l = reduce(ε₀)` for every reduction prime other than `p`.
pub fn reduction_check(chi: &MulChar, psi: &AddChar, dx: &HaarMeasure) -> Result<Outcome, String> {
    let p = chi.field().p();
    let e = epsilon0_char(chi, psi, dx).map_err(err)?;
    let n = gauss_level(chi, psi, dx).map_err(err)?;
    for l in REDUCTION_PRIMES.into_iter().filter(|&l| l != p) {
        let r = ReductionMap::new(n, p, l).map_err(err)?;
        let lhs = epsilon0_mod_l(chi, psi, dx, &r).map_err(err)?;
        if lhs != r.reduce_cyc(&e).map_err(err)? {
            return Ok((Some(format!("mismatch mod {l}")), vec![e]));
        }
    }
    Ok((None, vec![e]))
}

/// Built-in cyclotomic filtrations: integrality, positivity, agreement with
/// the class-field-theoretic conductors, quotient compatibility.
pub fn swan(seed: u64) -> SuiteReport {
    let mut cases = Vec::new();
    for (p, n) in [(3u64, 1u32), (3, 2), (3, 3), (5, 1), (5, 2)] {
        cases.push(case(format!("conductors:p={p},n={n}"), move || {
            swan_conductors(p, n)
        }));
        cases.push(case(format!("quotients:p={p},n={n}"), move || {
            swan_quotients(p, n)
        }));
    }
    run(Suite::Swan, seed, cases)
}

pub fn swan_conductors(p: u64, n: u32) -> Result<Outcome, String> {
    let f = builtin_cyclotomic_filtration(p, n).map_err(err)?;
    let integral = |c: &crate::swan::ClassFunction| c.class_values().iter().all(|v| v.is_integer());
    if !integral(&artin_character(&f).map_err(err)?) || !integral(&swan_character(&f).map_err(err)?)
    {
        return Ok((Some("non-integral class function".into()), Vec::new()));
    }
    for chi in f.group().abelian_characters().map_err(err)? {
        let v: Vec<CycNum> = chi.iter().map(|r| r.to_cyc(p)).collect();
        let a = conductor_pairing(&f, &v).map_err(err)?;
        let sw = swan_pairing(&f, &v).map_err(err)?;
        let mc = cyclotomic_transfer(p, n, &chi).map_err(err)?;
        let want_a = BigRational::from_integer(BigInt::from(mc.conductor()));
        let want_sw = BigRational::from_integer(BigInt::from(mc.swan()));
        if sw.is_negative() {
            return Ok((Some(format!("negative Swan pairing {sw}")), Vec::new()));
        }
        if a != want_a || sw != want_sw {
            return Ok((
                Some(format!(
                    "pairings ({a}, {sw}) vs conductor {}",
                    mc.conductor()
                )),
                Vec::new(),
            ));
        }
    }
    Ok((None, Vec::new()))
}

fn cyclic_subgroups(f: &RamFiltration) -> Vec<Vec<usize>> {
    let g = f.group();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for x in 0..g.order() {
        let mut h = vec![0];
        let mut y = x;
        while y != 0 {
            h.push(y);
            y = g.mul(y, x);
        }
        h.sort_unstable();
        if !out.contains(&h) {
            out.push(h);
        }
    }
    out
}

pub fn swan_quotients(p: u64, n: u32) -> Result<Outcome, String> {
    let f = builtin_cyclotomic_filtration(p, n).map_err(err)?;
    let a = artin_character(&f).map_err(err)?;
    let sw = swan_character(&f).map_err(err)?;
    for h in cyclic_subgroups(&f) {
        let (qf, proj) = f.quotient(&h).map_err(err)?;
        let qa = artin_character(&qf).map_err(err)?;
        let qsw = swan_character(&qf).map_err(err)?;
        for chi in qf.group().abelian_characters().map_err(err)? {
            let vq: Vec<CycNum> = chi.iter().map(|r| r.to_cyc(p)).collect();
            let v = inflate(&proj, &vq);
            let ok_a = pair_with_character(f.group(), &a, &v).map_err(err)?
                == pair_with_character(qf.group(), &qa, &vq).map_err(err)?;
            let ok_sw = pair_with_character(f.group(), &sw, &v).map_err(err)?
                == pair_with_character(qf.group(), &qsw, &vq).map_err(err)?;
            if !ok_a || !ok_sw {
                return Ok((
                    Some(format!("quotient by subgroup of order {}", h.len())),
                    Vec::new(),
                ));
            }
        }
    }
    Ok((None, Vec::new()))
}

/// `ε₀` is a unit with norm `±p^k` on seeded families, and the unit group of
/// `ℤ[1/p][ζ]` is closed under products and inverses.
pub fn units(seed: u64, count: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields = formulary_fields();
    let mut cases = Vec::new();
    for i in 0..count {
        let (field, amax) = fields[rng.gen_range(0..fields.len())];
        let p = field.p();
        let pv = random_unit(&mut rng, p);
        let chi = random_char(&mut rng, field, amax, pv);
        let psi = random_psi(&mut rng, field, -1..=2);
        let dx = HaarMeasure::new(random_unit(&mut rng, p)).expect("unit");
        let (u1, u2) = (random_unit(&mut rng, p), random_unit(&mut rng, p));
        cases.push(case(
            format!("{i}:{field}:a={}", chi.conductor()),
            move || {
                let e = epsilon0_char(&chi, &psi, &dx).map_err(err)?;
                let prod = &u1 * &u2;
                let inv = u1.inverse().map_err(err)?;
                let lvl = prod.level();
                let n1 = u1.lift_to(lvl).map_err(err)?.norm();
                let n2 = u2.lift_to(lvl).map_err(err)?.norm();
                Ok((
                    first_failure(&[
                        ("epsilon unit", is_certified_unit(&e, p)),
                        ("product unit", prod.is_unit()),
                        ("inverse", &inv * &u1 == CycNum::one(p)),
                        ("norm multiplicative", prod.norm() == n1 * n2),
                    ]),
                    vec![e],
                ))
            },
        ));
    }
    run(Suite::Units, seed, cases)
}

/// Default case counts per suite.
pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    match suite {
        Suite::Formulary => formulary(seed, 200),
        Suite::Induction => induction(seed),
        Suite::Reduction => reduction(seed, 12),
        Suite::Swan => swan(seed),
        Suite::Units => units(seed, 100),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_small() {
        for r in [
            formulary(7, 20),
            induction(7),
            reduction(7, 3),
            swan(7),
            units(7, 20),
        ] {
            let bad: Vec<_> = r.cases.iter().filter(|c| !c.passed).collect();
            assert!(r.passed(), "{}: {bad:?}", r.suite);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        assert_eq!(formulary(11, 10), formulary(11, 10));
        assert_ne!(
            formulary(11, 10)
                .cases
                .iter()
                .map(|c| &c.name)
                .collect::<Vec<_>>(),
            formulary(12, 10)
                .cases
                .iter()
                .map(|c| &c.name)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn signed_p_powers() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert!(is_signed_p_power(&r(-9, 1), 3));
        assert!(is_signed_p_power(&r(1, 27), 3));
        assert!(!is_signed_p_power(&r(6, 1), 3));
    }
}
