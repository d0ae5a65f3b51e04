use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::kelem::KElement;
use super::ring::{quot_ring, QuotRing, RingElem};
use super::{LocalFieldError, LocalFieldSpec};

/// An unramified extension `L/K` at a common precision `m`, with the
/// embedding `𝒪_K/π^m → 𝒪_L/π^m`, its left inverse, and the Frobenius of
/// `L/K`.
#[derive(Debug)]
pub struct UnramifiedExt {
    base: Arc<QuotRing>,
    top: Arc<QuotRing>,
    fprime: usize,
    /// Images of `x_K^i`, `i < f_K`.
    embed_basis: Vec<RingElem>,
    /// Left inverse of the embedding matrix, `f_K × f_L` over `A`.
    projection: Vec<Vec<u64>>,
    /// `σ(y)^i` for the Frobenius `σ` of `L/K`, `i < f_L`.
    frob_powers: Vec<RingElem>,
}

type ExtKey = (LocalFieldSpec, LocalFieldSpec, u32);
static CACHE: OnceLock<Mutex<HashMap<ExtKey, Arc<UnramifiedExt>>>> = OnceLock::new();

/// The extension `top/base` at precision `m`, shared per key.
pub fn unramified_ext(
    base: LocalFieldSpec,
    top: LocalFieldSpec,
    m: u32,
) -> Result<Arc<UnramifiedExt>, LocalFieldError> {
    if !top.is_extension_of(&base) {
        return Err(LocalFieldError::NotUnramified { base, top });
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (base, top, m);
    if let Some(e) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(e.clone());
    }
    let e = Arc::new(UnramifiedExt::build(
        quot_ring(base, m)?,
        quot_ring(top, m)?,
    ));
    Ok(cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .entry(key)
        .or_insert(e)
        .clone())
}

/// Apply the `A`-linear ring map sending `y^i` to `images[i]`.
fn apply(r: &QuotRing, images: &[RingElem], e: &RingElem) -> RingElem {
    e.coords()
        .iter()
        .zip(images)
        .fold(r.zero(), |acc, (&c, img)| r.add(&acc, &r.scale(img, c)))
}

fn powers(r: &QuotRing, x: &RingElem, n: usize) -> Vec<RingElem> {
    let mut out = Vec::with_capacity(n);
    let mut cur = r.one();
    for _ in 0..n {
        out.push(cur.clone());
        cur = r.mul(&cur, x);
    }
    out
}

impl UnramifiedExt {
    fn build(base: Arc<QuotRing>, top: Arc<QuotRing>) -> UnramifiedExt {
        let (fk, fl) = (base.f(), top.f());
        let p = top.p() as u128;
        let hk = base.modulus().to_vec();

        // Root of h_K in L lifting the Conway-compatible residue root
        // y^{(p^{f_L}-1)/(p^{f_K}-1)}, or any residue root if that fails.
        let e = (p.pow(fl as u32) - 1) / (p.pow(fk as u32) - 1);
        let is_residue_root = |r: &RingElem| !top.is_unit(&top.eval_base_poly(&hk, r));
        let mut start = top.pow(&top.gen(), e);
        if !is_residue_root(&start) {
            let residue = quot_ring(top.field(), 1).expect("residue field");
            let q = residue.size().expect("small residue field");
            start = (0..q)
                .map(|i| top.reduce_coords(residue.from_index(i).coords()))
                .find(|r| is_residue_root(r))
                .expect("h_K splits in the residue field of L");
        }
        let root = top.newton_root(&hk, &start);
        let embed_basis = powers(&top, &root, fk);

        // σ_abs(y) is the root of h_L lifting y^p.
        let hl = top.modulus().to_vec();
        let abs_y = top.newton_root(&hl, &top.pow(&top.gen(), p));
        let abs_images = powers(&top, &abs_y, fl);
        let mut rel_y = top.gen();
        for _ in 0..fk {
            rel_y = apply(&top, &abs_images, &rel_y);
        }
        let frob_powers = powers(&top, &rel_y, fl);

        let projection = Self::left_inverse(&top, &embed_basis);
        UnramifiedExt {
            fprime: fl / fk,
            base,
            top,
            embed_basis,
            projection,
            frob_powers,
        }
    }

    /// Gaussian elimination over `A` with unit pivots on `[B | I]`, where
    /// column `i` of `B` holds the coordinates of `x_K^i`.
    fn left_inverse(top: &QuotRing, basis: &[RingElem]) -> Vec<Vec<u64>> {
        let fk = basis.len();
        let fl = top.f();
        let p = top.p();
        let mut rows: Vec<(Vec<u64>, Vec<u64>)> = (0..fl)
            .map(|r| {
                let lhs = basis.iter().map(|b| b.coords()[r]).collect();
                let mut rhs = vec![0u64; fl];
                rhs[r] = 1;
                (lhs, rhs)
            })
            .collect();
        for c in 0..fk {
            let piv = (c..fl)
                .find(|&r| !rows[r].0[c].is_multiple_of(p))
                .expect("embedding is injective on residues");
            rows.swap(c, piv);
            let inv = top.a_inv(rows[c].0[c]).expect("unit pivot");
            let (l, r) = &mut rows[c];
            for x in l.iter_mut().chain(r.iter_mut()) {
                *x = top.a_mul(*x, inv);
            }
            let pivot_row = rows[c].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                let k = row.0[c];
                if r == c || k == 0 {
                    continue;
                }
                for (x, &y) in row.0.iter_mut().zip(&pivot_row.0) {
                    *x = top.a_sub(*x, top.a_mul(k, y));
                }
                for (x, &y) in row.1.iter_mut().zip(&pivot_row.1) {
                    *x = top.a_sub(*x, top.a_mul(k, y));
                }
            }
        }
        rows.truncate(fk);
        rows.into_iter().map(|(_, r)| r).collect()
    }

    pub fn base(&self) -> &Arc<QuotRing> {
        &self.base
    }

    pub fn top(&self) -> &Arc<QuotRing> {
        &self.top
    }

    /// `[L:K]`.
    pub fn degree(&self) -> usize {
        self.fprime
    }

    pub fn embed(&self, a: &RingElem) -> RingElem {
        apply(&self.top, &self.embed_basis, a)
    }

    /// Inverse of [`embed`](Self::embed) on its image.
    pub fn restrict(&self, e: &RingElem) -> Result<RingElem, LocalFieldError> {
        let coords: Vec<u64> = self
            .projection
            .iter()
            .map(|row| {
                row.iter()
                    .zip(e.coords())
                    .fold(0, |acc, (&a, &b)| self.top.a_add(acc, self.top.a_mul(a, b)))
            })
            .collect();
        let a = RingElem(coords);
        if self.embed(&a) != *e {
            return Err(LocalFieldError::NotInBase);
        }
        Ok(a)
    }

    /// The Frobenius of `L/K`: the automorphism lifting `z ↦ z^{q_K}`.
    pub fn frobenius(&self, e: &RingElem) -> RingElem {
        apply(&self.top, &self.frob_powers, e)
    }

    pub fn conjugates(&self, e: &RingElem) -> Vec<RingElem> {
        let mut out = Vec::with_capacity(self.fprime);
        let mut cur = e.clone();
        for _ in 0..self.fprime {
            out.push(cur.clone());
            cur = self.frobenius(&cur);
        }
        out
    }

    /// `Tr_{L/K}`, the sum of the Frobenius conjugates.
    pub fn trace(&self, e: &RingElem) -> RingElem {
        let s = self
            .conjugates(e)
            .iter()
            .fold(self.top.zero(), |acc, c| self.top.add(&acc, c));
        self.restrict(&s).expect("trace is Frobenius invariant")
    }

    /// `N_{L/K}`, the product of the Frobenius conjugates.
    pub fn norm(&self, e: &RingElem) -> RingElem {
        let s = self
            .conjugates(e)
            .iter()
            .fold(self.top.one(), |acc, c| self.top.mul(&acc, c));
        self.restrict(&s).expect("norm is Frobenius invariant")
    }

    fn check_k(&self, a: &KElement, want: LocalFieldSpec) -> Result<(), LocalFieldError> {
        if a.field() != want {
            return Err(LocalFieldError::FieldMismatch(a.field(), want));
        }
        if a.precision() < self.base.precision() {
            return Err(LocalFieldError::PrecisionMismatch(
                a.precision(),
                self.base.precision(),
            ));
        }
        Ok(())
    }

    pub fn embed_k(&self, a: &KElement) -> Result<KElement, LocalFieldError> {
        self.check_k(a, self.base.field())?;
        let u = self.base.reduce_coords(a.unit().coords());
        KElement::new(
            self.top.field(),
            a.valuation(),
            self.top.precision(),
            self.embed(&u),
        )
    }

    /// `N_{L/K}` on `L^×`; `N(π^v u) = π^{f' v} N(u)`.
    pub fn norm_k(&self, a: &KElement) -> Result<KElement, LocalFieldError> {
        self.check_k(a, self.top.field())?;
        let u = self.top.reduce_coords(a.unit().coords());
        KElement::new(
            self.base.field(),
            a.valuation() * self.fprime as i64,
            self.base.precision(),
            self.norm(&u),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(base: &str, top: &str, m: u32) -> Arc<UnramifiedExt> {
        unramified_ext(base.parse().unwrap(), top.parse().unwrap(), m).unwrap()
    }

    #[test]
    fn f4_trace_of_generator() {
        let e = ext("laurent:p=2,f=1", "laurent:p=2,f=2", 1);
        let x = e.top().gen();
        assert_eq!(e.trace(&x), e.base().one());
        // x + x^2 = 1
        let s = e.top().add(&x, &e.top().mul(&x, &x));
        assert_eq!(s, e.top().one());
    }

    #[test]
    fn trace_of_base_element_is_multiplication_by_degree() {
        for (b, t, m) in [
            ("padic:p=3,f=1", "padic:p=3,f=2", 3),
            ("padic:p=5,f=1", "padic:p=5,f=3", 2),
            ("padic:p=2,f=2", "padic:p=2,f=4", 3),
            ("laurent:p=2,f=1", "laurent:p=2,f=3", 3),
        ] {
            let e = ext(b, t, m);
            let base = e.base();
            for i in 0..base.size().unwrap().min(200) {
                let a = base.from_index(i);
                let want = base.scale(&a, base.a_from_int(e.degree() as i64));
                assert_eq!(e.trace(&e.embed(&a)), want, "{t}");
                assert_eq!(e.restrict(&e.embed(&a)), Ok(a));
            }
        }
    }

    #[test]
    fn frobenius_has_exact_order_and_lifts_q_power() {
        let e = ext("padic:p=3,f=1", "padic:p=3,f=2", 3);
        let top = e.top();
        let y = top.gen();
        let conj = e.conjugates(&y);
        assert_ne!(conj[1], y);
        assert_eq!(e.frobenius(&conj[1]), y);
        let res = quot_ring(top.field(), 1).unwrap();
        let frob_res = res.reduce_coords(e.frobenius(&y).coords());
        assert_eq!(frob_res, res.pow(&res.gen(), 3));
        // σ is a ring map
        let a = top.from_coords(&[4, 7]).unwrap();
        let b = top.from_coords(&[11, 2]).unwrap();
        assert_eq!(
            e.frobenius(&top.mul(&a, &b)),
            top.mul(&e.frobenius(&a), &e.frobenius(&b))
        );
    }

    #[test]
    fn trace_is_additive_and_norm_multiplicative() {
        let e = ext("padic:p=3,f=1", "padic:p=3,f=2", 2);
        let top = e.top();
        let n = top.size().unwrap();
        for i in (0..n).step_by(7) {
            for j in (0..n).step_by(11) {
                let (a, b) = (top.from_index(i), top.from_index(j));
                let lhs = e.trace(&top.add(&a, &b));
                assert_eq!(lhs, e.base().add(&e.trace(&a), &e.trace(&b)));
                let lhs = e.norm(&top.mul(&a, &b));
                assert_eq!(lhs, e.base().mul(&e.norm(&a), &e.norm(&b)));
            }
        }
    }

    #[test]
    fn restrict_rejects_outside_image() {
        let e = ext("padic:p=3,f=1", "padic:p=3,f=2", 2);
        assert_eq!(e.restrict(&e.top().gen()), Err(LocalFieldError::NotInBase));
    }

    #[test]
    fn rejects_non_extension() {
        let r = unramified_ext(
            "padic:p=3,f=2".parse().unwrap(),
            "padic:p=3,f=3".parse().unwrap(),
            1,
        );
        assert!(matches!(r, Err(LocalFieldError::NotUnramified { .. })));
    }
}
