use std::fs;
use std::path::Path;

use epsilon_core::chars::MulCharRepr;
use epsilon_core::swan::{
    cyclotomic_transfer, pair_with_character, ClassFunction, FiltrationFixture,
};
use epsilon_core::{
    artin_character, builtin_cyclotomic_filtration, epsilon0_char, epsilon0_mod_l, epsilon_full,
    gauss_level, run_suite, swan_character, CycNum, EpsilonError, FinFieldElem, FiniteGroupData,
    KElementRepr, MulChar, RamFiltration, ReduceError, ReductionMap, Suite, SwanError, VirtualRep,
};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::input::{self, Job};
use crate::CliError;

const DEFAULT_PRIMES: [u64; 5] = [2, 5, 7, 11, 13];

fn eps_err(e: EpsilonError) -> CliError {
    match e {
        EpsilonError::NotUnit(v) => {
            CliError::Invariant(format!("epsilon factor {v} is not a unit"))
        }
        other => CliError::Parse(other.to_string()),
    }
}

fn red_err(e: ReduceError) -> CliError {
    match e {
        ReduceError::Epsilon(e) => eps_err(e),
        ReduceError::ZeroReduction => CliError::Invariant(e.to_string()),
        other => CliError::Parse(other.to_string()),
    }
}

fn swan_err(e: SwanError) -> CliError {
    match e {
        SwanError::NotIntegral(_) | SwanError::SwanOffWild => CliError::Invariant(e.to_string()),
        other => CliError::Parse(other.to_string()),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// A cyclotomic number with its root-of-unity form when it has one.
#[derive(Serialize)]
struct Value {
    text: String,
    level: u64,
    coeffs: Vec<String>,
    root_of_unity: Option<[u64; 2]>,
}

impl Value {
    fn of(x: &CycNum) -> Value {
        Value {
            text: x.to_string(),
            level: x.level(),
            coeffs: x
                .coeffs()
                .iter()
                .map(|c| {
                    if c.is_integer() {
                        c.numer().to_string()
                    } else {
                        c.to_string()
                    }
                })
                .collect(),
            root_of_unity: x.as_root_of_unity().map(|r| {
                let r = r.reduced();
                [r.order(), r.exp()]
            }),
        }
    }
}

#[derive(Serialize)]
struct ComputeRecord {
    field: String,
    character: MulCharRepr,
    swan: u32,
    psi_twist: KElementRepr,
    psi_level: i64,
    vol: Value,
    value: Value,
    level: u64,
    norm: String,
    is_unit: bool,
    epsilon_full: Value,
}

pub fn compute(job: &Job) -> Result<String, CliError> {
    let e = epsilon0_char(&job.chi, &job.psi, &job.dx).map_err(eps_err)?;
    let full = epsilon_full(&VirtualRep::character(job.chi.clone()), &job.psi, &job.dx)
        .map_err(eps_err)?;
    if !e.is_unit() {
        return Err(CliError::Invariant(format!(
            "epsilon factor {e} is not a unit"
        )));
    }
    Ok(json(&ComputeRecord {
        field: job.field.to_string(),
        character: job.chi.to_repr(),
        swan: job.chi.swan(),
        psi_twist: job.psi.twist().to_repr(),
        psi_level: job.psi.level(),
        vol: Value::of(job.dx.volume()),
        value: Value::of(&e),
        level: e.level(),
        norm: e.norm().to_string(),
        is_unit: e.is_unit(),
        epsilon_full: Value::of(&full),
    }))
}

pub fn verify(suite: &str, seed: u64) -> Result<String, CliError> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite
            .parse()
            .map_err(|e: String| CliError::Parse(format!("--suite: {e}")))?]
    };
    let reports: Vec<_> = suites.into_iter().map(|s| run_suite(s, seed)).collect();
    let ok = reports.iter().all(|r| r.passed());
    let text = if reports.len() == 1 {
        json(&reports[0])
    } else {
        json(&reports)
    };
    if ok {
        Ok(text)
    } else {
        Err(CliError::Failed(text))
    }
}

pub struct TableArgs {
    pub field: String,
    pub a: u32,
    pub pi: String,
    pub exact: bool,
    pub psi_twist: String,
    pub vol: String,
    pub cap: u128,
}

pub const TABLE_HEADER: [&str; 8] = [
    "field",
    "a",
    "chi_pi",
    "unit_exps",
    "n_psi",
    "m0",
    "value",
    "norm",
];

pub fn table(t: &TableArgs) -> Result<String, CliError> {
    let field = input::parse_field(&t.field)?;
    let p = field.p();
    let pi = input::parse_cyc("pi", p, &t.pi)?;
    let psi = input::parse_psi(field, &t.psi_twist)?;
    let dx = input::parse_vol(p, &t.vol)?;
    let family = MulChar::family(field, t.a, &pi, t.exact, t.cap)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let rows: Vec<[String; 8]> = family
        .par_iter()
        .map(|chi| {
            let e = epsilon0_char(chi, &psi, &dx).map_err(eps_err)?;
            let exps: Vec<String> = chi.unit_exps().iter().map(u64::to_string).collect();
            Ok([
                field.to_string(),
                chi.conductor().to_string(),
                chi.pi_value().to_string(),
                exps.join(" "),
                psi.level().to_string(),
                dx.volume().to_string(),
                e.to_string(),
                e.norm().to_string(),
            ])
        })
        .collect::<Result<_, CliError>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(TABLE_HEADER).map_err(csv_err)?;
    for r in &rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("utf-8 fields"))
}

#[derive(Serialize)]
struct CharacterCheck {
    values: Vec<[u64; 2]>,
    artin_pairing: String,
    swan_pairing: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    class_field_conductor: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    class_field_swan: Option<u32>,
    passed: bool,
}

#[derive(Serialize)]
struct SwanRecord {
    source: String,
    order: usize,
    classes: Vec<Vec<usize>>,
    chain_orders: Vec<usize>,
    artin: Vec<i64>,
    swan: Vec<i64>,
    characters: Vec<CharacterCheck>,
    passed: bool,
}

/// Subgroup generated by commutators.
fn commutator_subgroup(g: &FiniteGroupData) -> Vec<usize> {
    let n = g.order();
    let mut inside = vec![false; n];
    inside[0] = true;
    let mut elems = vec![0];
    let gens: Vec<usize> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| g.mul(g.mul(x, y), g.mul(g.inv(x), g.inv(y))))
        .collect();
    let mut i = 0;
    while i < elems.len() {
        for &c in &gens {
            let z = g.mul(elems[i], c);
            if !inside[z] {
                inside[z] = true;
                elems.push(z);
            }
        }
        i += 1;
    }
    elems.sort_unstable();
    elems
}

/// `⟨a_J, χ⟩`, `⟨Sw_J, χ⟩` for every one-dimensional character, the
/// latter required nonnegative; with `transfer`, also compared with the
/// conductor of the matching character of `ℚ_p^×`.
fn swan_record(
    source: String,
    f: &RamFiltration,
    transfer: Option<(u64, u32)>,
) -> Result<(SwanRecord, bool), CliError> {
    let a = artin_character(f).map_err(swan_err)?;
    let sw = swan_character(f).map_err(swan_err)?;
    let g = f.group();
    let (quot, proj) = g.quotient(&commutator_subgroup(g)).map_err(swan_err)?;
    let p = transfer.map_or(2, |t| t.0);
    let pair = |c: &ClassFunction, v: &[CycNum]| pair_with_character(g, c, v).map_err(swan_err);
    let mut characters = Vec::new();
    for chi in quot.abelian_characters().map_err(swan_err)? {
        let chi: Vec<_> = proj.iter().map(|&i| chi[i]).collect();
        let v: Vec<CycNum> = chi.iter().map(|r| r.to_cyc(p)).collect();
        let pa = pair(&a, &v)?;
        let ps = pair(&sw, &v)?;
        let mut passed = pa.is_integer() && ps.is_integer() && ps >= int(0);
        let (mut cond, mut swn) = (None, None);
        if let Some((p, n)) = transfer {
            let mc = cyclotomic_transfer(p, n, &chi).map_err(swan_err)?;
            passed &= pa == int(mc.conductor()) && ps == int(mc.swan());
            cond = Some(mc.conductor());
            swn = Some(mc.swan());
        }
        let values = chi
            .iter()
            .map(|r| {
                let r = r.reduced();
                [r.order(), r.exp()]
            })
            .collect();
        characters.push(CharacterCheck {
            values,
            artin_pairing: pa.to_string(),
            swan_pairing: ps.to_string(),
            class_field_conductor: cond,
            class_field_swan: swn,
            passed,
        });
    }
    let passed = characters.iter().all(|c| c.passed);
    let record = SwanRecord {
        source,
        order: g.order(),
        classes: g.classes().to_vec(),
        chain_orders: f.chain().iter().map(Vec::len).collect(),
        artin: a.integer_values(),
        swan: sw.integer_values(),
        characters,
        passed,
    };
    Ok((record, passed))
}

fn int(v: u32) -> BigRational {
    BigRational::from_integer(v.into())
}

fn finish(record: &impl Serialize, passed: bool) -> Result<String, CliError> {
    let text = json(record);
    if passed {
        Ok(text)
    } else {
        Err(CliError::Failed(text))
    }
}

pub fn swan_builtin(p: u64, n: u32) -> Result<String, CliError> {
    let f = builtin_cyclotomic_filtration(p, n).map_err(swan_err)?;
    let (r, ok) = swan_record(format!("builtin:p={p},n={n}"), &f, Some((p, n)))?;
    finish(&r, ok)
}

pub fn swan_fixture(path: &Path) -> Result<String, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("--fixture {}: {e}", path.display())))?;
    let fx: FiltrationFixture = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("--fixture {}: {e}", path.display())))?;
    let f = RamFiltration::from_fixture(&fx).map_err(swan_err)?;
    let (r, ok) = swan_record(format!("fixture:{}", fx.name), &f, None)?;
    finish(&r, ok)
}

#[derive(Serialize)]
struct ReductionCheck {
    l: u64,
    modulus: Vec<u64>,
    epsilon0_mod_l: FinFieldElem,
    reduced_epsilon0: FinFieldElem,
    passed: bool,
}

#[derive(Serialize)]
struct ReduceRecord {
    field: String,
    value: Value,
    level: u64,
    checks: Vec<ReductionCheck>,
    passed: bool,
}

pub fn reduce(job: &Job, primes: &[u64]) -> Result<String, CliError> {
    let p = job.field.p();
    let primes: Vec<u64> = if primes.is_empty() {
        DEFAULT_PRIMES.into_iter().filter(|&l| l != p).collect()
    } else {
        primes.to_vec()
    };
    let e = epsilon0_char(&job.chi, &job.psi, &job.dx).map_err(eps_err)?;
    let n = gauss_level(&job.chi, &job.psi, &job.dx).map_err(red_err)?;
    let mut checks = Vec::new();
    for l in primes {
        let r = ReductionMap::new(n, p, l).map_err(red_err)?;
        let lhs = epsilon0_mod_l(&job.chi, &job.psi, &job.dx, &r).map_err(red_err)?;
        let rhs = r.reduce_cyc(&e).map_err(red_err)?;
        checks.push(ReductionCheck {
            l,
            modulus: r.modulus().to_vec(),
            passed: lhs == rhs,
            epsilon0_mod_l: lhs,
            reduced_epsilon0: rhs,
        });
    }
    let passed = checks.iter().all(|c| c.passed);
    let record = ReduceRecord {
        field: job.field.to_string(),
        value: Value::of(&e),
        level: n,
        checks,
        passed,
    };
    finish(&record, passed)
}
