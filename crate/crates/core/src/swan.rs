//! Artin and Swan characters of a finite quotient `J` of inertia from a
//! supplied lower-numbering filtration `J = J₀ ⊵ J₁ ⊵ … ⊵ J_r = {1}`.
//!
//! `a_J = Σ_{i≥0} [J₀:J_i]^{-1} Ind_{J_i}^{J₀} u_i` and `Sw_J` is the same sum
//! over `i ≥ 1`, with `u_i` the augmentation character of `J_i`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::AbelianPresentation;
use crate::chars::{CharError, MulChar};
use crate::coeff::{CycNum, RootOfUnity};
use crate::localfield::{unit_group, LocalFieldSpec};

/// Largest group accepted.
pub const MAX_GROUP: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SwanError {
    #[error("not a group: {0}")]
    NotGroup(String),
    #[error("conjugacy classes do not match the multiplication table")]
    BadClasses,
    #[error("J_{0} is not a subgroup")]
    NotSubgroup(usize),
    #[error("J_{0} is not normal in J_0")]
    NotNormal(usize),
    #[error("J_{0} is not contained in its predecessor")]
    NotDescending(usize),
    #[error("J_0 must be the whole group")]
    BadTop,
    #[error("the last group of the chain must be trivial")]
    NotEventuallyTrivial,
    #[error("class function value {0} is not an integer")]
    NotIntegral(String),
    #[error("Swan character does not vanish off J_1")]
    SwanOffWild,
    #[error("character values must be roots of unity")]
    NotRootOfUnity,
    #[error("character is not a homomorphism")]
    NotHomomorphism,
    #[error("expected {expected} character values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("pairing {0} is not a nonnegative integer")]
    BadPairing(String),
    #[error("group is not abelian")]
    NotAbelian,
    #[error("no built-in filtration for p={p}, n={n}")]
    Unsupported { p: u64, n: u32 },
    #[error("not a normal subgroup")]
    NotNormalSubgroup,
    #[error("fixture: {0}")]
    Fixture(String),
    #[error(transparent)]
    Char(#[from] CharError),
}

/// A finite group by multiplication table; element 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupData {
    n: usize,
    table: Vec<usize>,
    inv: Vec<usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

fn canonical_classes(mut classes: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for c in classes.iter_mut() {
        c.sort_unstable();
        c.dedup();
    }
    classes.sort();
    classes
}

impl FiniteGroupData {
    /// Validate a table (`table[a][b] = ab`) and optional conjugacy classes.
    pub fn new(
        table: Vec<Vec<usize>>,
        classes: Option<Vec<Vec<usize>>>,
    ) -> Result<Self, SwanError> {
        let n = table.len();
        let bad = |s: &str| SwanError::NotGroup(s.to_string());
        if n == 0 || n > MAX_GROUP {
            return Err(bad("order out of range"));
        }
        if table
            .iter()
            .any(|r| r.len() != n || r.iter().any(|&x| x >= n))
        {
            return Err(bad("table is not square over 0..n"));
        }
        let flat: Vec<usize> = table.concat();
        let mul = |a: usize, b: usize| flat[a * n + b];
        if (0..n).any(|a| mul(0, a) != a || mul(a, 0) != a) {
            return Err(bad("element 0 is not the identity"));
        }
        let mut inv = vec![usize::MAX; n];
        for (a, slot) in inv.iter_mut().enumerate() {
            *slot = (0..n)
                .find(|&b| mul(a, b) == 0)
                .ok_or_else(|| bad("missing inverse"))?;
            if mul(*slot, a) != 0 {
                return Err(bad("left and right inverses differ"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(bad("not associative"));
                    }
                }
            }
        }
        let mut class_of = vec![usize::MAX; n];
        let mut found = Vec::new();
        for a in 0..n {
            if class_of[a] != usize::MAX {
                continue;
            }
            let mut c: Vec<usize> = (0..n).map(|x| mul(mul(x, a), inv[x])).collect();
            c.sort_unstable();
            c.dedup();
            for &y in &c {
                class_of[y] = found.len();
            }
            found.push(c);
        }
        let ours = canonical_classes(found.clone());
        if let Some(given) = classes {
            let given_flat: usize = given.iter().map(|c| c.len()).sum();
            if given_flat != n || canonical_classes(given) != ours {
                return Err(SwanError::BadClasses);
            }
        }
        Ok(FiniteGroupData {
            n,
            table: flat,
            inv,
            classes: found,
            class_of,
        })
    }

    pub fn cyclic(n: usize) -> Result<Self, SwanError> {
        Self::new(
            (0..n)
                .map(|a| (0..n).map(|b| (a + b) % n).collect())
                .collect(),
            None,
        )
    }

    /// `(ℤ/m)^×` with elements listed by ascending residue; index 0 is 1.
    pub fn units_mod(m: u64) -> Result<(Self, Vec<u64>), SwanError> {
        let elems: Vec<u64> = (1..m.max(2)).filter(|a| a.gcd(&m) == 1).collect();
        let elems = if m == 1 { vec![0] } else { elems };
        let idx = |x: u64| elems.binary_search(&x).expect("unit");
        let table = elems
            .iter()
            .map(|&a| elems.iter().map(|&b| idx((a * b) % m.max(1))).collect())
            .collect();
        Ok((Self::new(table, None)?, elems))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, a: usize) -> usize {
        self.class_of[a]
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    fn is_subgroup(&self, h: &[usize]) -> bool {
        let mut mem = vec![false; self.n];
        for &x in h {
            if x >= self.n {
                return false;
            }
            mem[x] = true;
        }
        mem[0]
            && h.iter()
                .all(|&a| mem[self.inv(a)] && h.iter().all(|&b| mem[self.mul(a, b)]))
    }

    fn is_normal(&self, h: &[usize]) -> bool {
        let mut mem = vec![false; self.n];
        h.iter().for_each(|&x| mem[x] = true);
        h.iter()
            .all(|&a| (0..self.n).all(|x| mem[self.mul(self.mul(x, a), self.inv(x))]))
    }

    /// All characters of an abelian group, as values per element.
    pub fn abelian_characters(&self) -> Result<Vec<Vec<RootOfUnity>>, SwanError> {
        if !self.is_abelian() {
            return Err(SwanError::NotAbelian);
        }
        let pres = AbelianPresentation::build(self.n, 0, |a, b| self.mul(a, b));
        let orders = pres.gen_orders().to_vec();
        let mut out = Vec::new();
        let mut exps = vec![0u64; orders.len()];
        loop {
            let values = (0..self.n)
                .map(|x| {
                    let ks = pres.dlog(x);
                    orders
                        .iter()
                        .zip(&exps)
                        .zip(ks)
                        .fold(RootOfUnity::one(), |acc, ((&d, &e), &k)| {
                            acc.mul(&RootOfUnity::new(d, (e * k % d) as i64))
                        })
                })
                .collect();
            out.push(values);
            let mut i = exps.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                exps[i] += 1;
                if exps[i] < orders[i] {
                    break;
                }
                exps[i] = 0;
            }
        }
    }

    /// `G/H` for a normal subgroup `H`, with the projection `G → G/H`.
    /// Cosets are numbered by their smallest element.
    pub fn quotient(&self, h: &[usize]) -> Result<(FiniteGroupData, Vec<usize>), SwanError> {
        if !self.is_subgroup(h) || !self.is_normal(h) {
            return Err(SwanError::NotNormalSubgroup);
        }
        let mut proj = vec![usize::MAX; self.n];
        let mut reps = Vec::new();
        for a in 0..self.n {
            if proj[a] != usize::MAX {
                continue;
            }
            for &x in h {
                proj[self.mul(a, x)] = reps.len();
            }
            reps.push(a);
        }
        let table = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| proj[self.mul(a, b)]).collect())
            .collect();
        Ok((FiniteGroupData::new(table, None)?, proj))
    }
}

/// Lower-numbering filtration; `J_i` is trivial for `i` past the chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamFiltration {
    group: FiniteGroupData,
    chain: Vec<Vec<usize>>,
}

/// On-disk form of a filtration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiltrationFixture {
    pub name: String,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<Vec<usize>>>,
    pub chain: Vec<Vec<usize>>,
}

impl RamFiltration {
    pub fn new(group: FiniteGroupData, chain: Vec<Vec<usize>>) -> Result<Self, SwanError> {
        let mut chain: Vec<Vec<usize>> = chain
            .into_iter()
            .map(|mut h| {
                h.sort_unstable();
                h.dedup();
                h
            })
            .collect();
        if chain.first().map(|h| h.len()) != Some(group.order()) {
            return Err(SwanError::BadTop);
        }
        for (i, h) in chain.iter().enumerate() {
            if !group.is_subgroup(h) {
                return Err(SwanError::NotSubgroup(i));
            }
            if !group.is_normal(h) {
                return Err(SwanError::NotNormal(i));
            }
            if i > 0 && !h.iter().all(|x| chain[i - 1].binary_search(x).is_ok()) {
                return Err(SwanError::NotDescending(i));
            }
        }
        if chain.last().map(|h| h.as_slice()) != Some(&[0]) {
            if group.order() == 1 {
                chain.push(vec![0]);
            } else {
                return Err(SwanError::NotEventuallyTrivial);
            }
        }
        Ok(RamFiltration { group, chain })
    }

    pub fn group(&self) -> &FiniteGroupData {
        &self.group
    }

    /// `J_0, …, J_r` with `J_r = {1}`.
    pub fn chain(&self) -> &[Vec<usize>] {
        &self.chain
    }

    pub fn subgroup(&self, i: usize) -> &[usize] {
        self.chain.get(i).map_or(&[0usize][..], |h| h.as_slice())
    }

    pub fn from_fixture(fx: &FiltrationFixture) -> Result<Self, SwanError> {
        let g = FiniteGroupData::new(fx.table.clone(), fx.classes.clone())?;
        RamFiltration::new(g, fx.chain.clone())
    }

    pub fn from_json(s: &str) -> Result<Self, SwanError> {
        let fx: FiltrationFixture =
            serde_json::from_str(s).map_err(|e| SwanError::Fixture(e.to_string()))?;
        Self::from_fixture(&fx)
    }

    pub fn to_fixture(&self, name: &str) -> FiltrationFixture {
        FiltrationFixture {
            name: name.to_string(),
            table: self.group.table(),
            classes: Some(canonical_classes(self.group.classes.clone())),
            chain: self.chain.clone(),
        }
    }

    /// Image filtration on `J/H`: `(J/H)_v` is the image of `J_k`, `k` the
    /// least integer with `φ_H(k) ≥ v`, `φ_H(k) = Σ_{t=1}^k [H_0:H_t]^{-1}`
    /// and `H_t = J_t ∩ H`.
    pub fn quotient(&self, h: &[usize]) -> Result<(RamFiltration, Vec<usize>), SwanError> {
        let (qg, proj) = self.group.quotient(h)?;
        let h0 = h.len();
        let ht = |t: usize| self.subgroup(t).iter().filter(|x| h.contains(x)).count();
        let image = |k: usize| {
            let mut img: Vec<usize> = self.subgroup(k).iter().map(|&x| proj[x]).collect();
            img.sort_unstable();
            img.dedup();
            img
        };
        let mut chain = vec![image(0)];
        let (mut k, mut phi) = (0usize, BigRational::zero());
        let mut v = 0;
        while chain.last().map_or(0, |c| c.len()) > 1 {
            v += 1;
            let target = BigRational::from_integer(BigInt::from(v));
            while phi < target {
                k += 1;
                phi += BigRational::new(BigInt::from(ht(k)), BigInt::from(h0));
            }
            chain.push(image(k));
        }
        Ok((RamFiltration::new(qg, chain)?, proj))
    }
}

/// Rational values per conjugacy class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFunction {
    values: Vec<BigRational>,
    class_of: Vec<usize>,
}

impl ClassFunction {
    pub fn class_values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn at(&self, element: usize) -> &BigRational {
        &self.values[self.class_of[element]]
    }

    /// Integer values per element.
    pub fn integer_values(&self) -> Vec<i64> {
        self.class_of
            .iter()
            .map(|&c| self.values[c].to_integer().to_i64().expect("small value"))
            .collect()
    }

    pub fn sub(&self, other: &ClassFunction) -> ClassFunction {
        ClassFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
            class_of: self.class_of.clone(),
        }
    }
}

/// `[J₀:J_i]^{-1} Ind_{J_i}^{J₀} u_i` at every element, via
/// `Ind_H^G φ(g) = |H|^{-1} Σ_{x ∈ G, xgx^{-1} ∈ H} φ(xgx^{-1})`.
fn layer(g: &FiniteGroupData, h: &[usize]) -> Vec<BigRational> {
    let n = g.order();
    let hn = h.len() as i64;
    let mut mem = vec![false; n];
    h.iter().for_each(|&x| mem[x] = true);
    let aug = |y: usize| if y == 0 { hn - 1 } else { -1 };
    g.classes()
        .iter()
        .map(|c| {
            let a = c[0];
            let s: i64 = (0..n)
                .map(|x| g.mul(g.mul(x, a), g.inv(x)))
                .filter(|&y| mem[y])
                .map(aug)
                .sum();
            // [J₀:H]^{-1} |H|^{-1} s = s / |G|
            BigRational::new(BigInt::from(s), BigInt::from(n as i64))
        })
        .collect()
}

fn sum_layers(f: &RamFiltration, start: usize) -> Result<ClassFunction, SwanError> {
    let g = &f.group;
    let mut values = vec![BigRational::zero(); g.classes().len()];
    for h in f.chain.iter().skip(start) {
        for (v, l) in values.iter_mut().zip(layer(g, h)) {
            *v += l;
        }
    }
    if let Some(v) = values.iter().find(|v| !v.is_integer()) {
        return Err(SwanError::NotIntegral(v.to_string()));
    }
    Ok(ClassFunction {
        values,
        class_of: g.class_of.clone(),
    })
}

pub fn artin_character(f: &RamFiltration) -> Result<ClassFunction, SwanError> {
    sum_layers(f, 0)
}

pub fn swan_character(f: &RamFiltration) -> Result<ClassFunction, SwanError> {
    let sw = sum_layers(f, 1)?;
    let wild = f.subgroup(1);
    let off_wild = (0..f.group.order()).any(|x| !wild.contains(&x) && !sw.at(x).is_zero());
    if off_wild {
        return Err(SwanError::SwanOffWild);
    }
    Ok(sw)
}

/// Check that values per element form a 1-dimensional character.
fn as_character(g: &FiniteGroupData, chi: &[CycNum]) -> Result<Vec<RootOfUnity>, SwanError> {
    if chi.len() != g.order() {
        return Err(SwanError::WrongLength {
            expected: g.order(),
            got: chi.len(),
        });
    }
    let roots = chi
        .iter()
        .map(|c| c.as_root_of_unity().ok_or(SwanError::NotRootOfUnity))
        .collect::<Result<Vec<_>, _>>()?;
    for a in 0..g.order() {
        for b in 0..g.order() {
            if roots[g.mul(a, b)] != roots[a].mul(&roots[b]) {
                return Err(SwanError::NotHomomorphism);
            }
        }
    }
    Ok(roots)
}

/// `⟨φ, χ⟩ = |J|^{-1} Σ_j φ(j) χ(j)`, required to be a nonnegative integer.
pub fn pair_with_character(
    g: &FiniteGroupData,
    phi: &ClassFunction,
    chi: &[CycNum],
) -> Result<BigRational, SwanError> {
    let roots = as_character(g, chi)?;
    let p = chi[0].p();
    let mut acc = CycNum::zero(1, p);
    for (j, r) in roots.iter().enumerate() {
        let c = phi.at(j);
        if c.is_zero() {
            continue;
        }
        acc = &acc + &r.to_cyc(p).scale_int(c.numer());
    }
    let total = acc
        .as_rational()
        .ok_or_else(|| SwanError::BadPairing(acc.to_string()))?;
    let val = total / BigRational::from_integer(BigInt::from(g.order() as i64));
    if !val.is_integer() || val.is_negative() {
        return Err(SwanError::BadPairing(val.to_string()));
    }
    Ok(val)
}

/// `⟨a_J, χ⟩`, the Artin conductor exponent of `χ`.
pub fn conductor_pairing(f: &RamFiltration, chi: &[CycNum]) -> Result<BigRational, SwanError> {
    pair_with_character(&f.group, &artin_character(f)?, chi)
}

/// `⟨Sw_J, χ⟩`.
pub fn swan_pairing(f: &RamFiltration, chi: &[CycNum]) -> Result<BigRational, SwanError> {
    pair_with_character(&f.group, &swan_character(f)?, chi)
}

/// Filtration of `Gal(ℚ_p(ζ_{p^n})/ℚ_p) ≅ (ℤ/p^n)^×`, elements by ascending
/// residue: `J_i = {a ≡ 1 mod p^k}` for `p^{k-1} ≤ i ≤ p^k - 1`.
pub fn builtin_cyclotomic_filtration(p: u64, n: u32) -> Result<RamFiltration, SwanError> {
    let small = p.checked_pow(n).is_some_and(|m| m <= 2 * MAX_GROUP as u64);
    if p.is_multiple_of(2) || !crate::coeff::fpoly::is_prime(p) || n == 0 || !small {
        return Err(SwanError::Unsupported { p, n });
    }
    let m = p.pow(n);
    let (g, elems) = FiniteGroupData::units_mod(m)?;
    let fixing = |k: u32| -> Vec<usize> {
        let pk = p.pow(k);
        (0..elems.len())
            .filter(|&i| elems[i] % pk == 1 % pk)
            .collect()
    };
    let top = p.pow(n - 1) as usize;
    let mut chain = vec![(0..g.order()).collect::<Vec<_>>()];
    for i in 1..=top {
        let k = (0..=n)
            .find(|&k| (i as u64) < p.pow(k))
            .expect("i ≤ p^{n-1}");
        chain.push(fixing(k.min(n)));
    }
    RamFiltration::new(g, chain)
}

/// The character of `ℚ_p^×` matching a character of `(ℤ/p^n)^×` under the
/// reciprocity map: `χ̃(u) = χ(u mod p^n)`, `χ̃(p) = 1`. Values are indexed
/// by ascending residue as in [`builtin_cyclotomic_filtration`].
pub fn cyclotomic_transfer(p: u64, n: u32, chi: &[RootOfUnity]) -> Result<MulChar, SwanError> {
    let field = LocalFieldSpec::padic(p, 1).map_err(CharError::from)?;
    let units = unit_group(field, n).map_err(CharError::from)?;
    let m = p.pow(n);
    let elems: Vec<u64> = (1..m).filter(|a| a % p != 0).collect();
    if chi.len() != elems.len() {
        return Err(SwanError::WrongLength {
            expected: elems.len(),
            got: chi.len(),
        });
    }
    let exps = units
        .generators()
        .iter()
        .zip(units.orders())
        .map(|(g, &d)| {
            let r = g.coords()[0];
            let i = elems.binary_search(&r).expect("unit residue");
            chi[i].exponent_at(d).ok_or(SwanError::NotHomomorphism)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MulChar::from_exponents(field, n, CycNum::one(p), exps)?)
}

/// Inflate a character of `J/H` to `J` along the projection.
pub fn inflate(proj: &[usize], chi_quotient: &[CycNum]) -> Vec<CycNum> {
    proj.iter().map(|&c| chi_quotient[c].clone()).collect()
}
