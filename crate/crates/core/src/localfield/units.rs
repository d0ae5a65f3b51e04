use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::ring::{quot_ring, QuotRing, RingElem};
use super::{LocalFieldError, LocalFieldSpec};
use crate::abelian::AbelianPresentation;

/// Largest unit group built by enumeration.
const MAX_UNITS: u64 = 1 << 22;

/// `(𝒪_K/π^m)^×` with an invariant-factor basis and a full dlog table,
/// built eagerly so that lookups are read-only.
#[derive(Debug)]
pub struct UnitGroupPresentation {
    ring: Arc<QuotRing>,
    /// Ring indices of the units, ascending.
    elems: Vec<u64>,
    /// Ring index to position in `elems`, `u32::MAX` for non-units.
    pos: Vec<u32>,
    pres: AbelianPresentation,
    generators: Vec<RingElem>,
}

type Cache = Mutex<HashMap<(LocalFieldSpec, u32), Arc<UnitGroupPresentation>>>;

static CACHE: OnceLock<Cache> = OnceLock::new();

/// The unit group of `𝒪_K/π^m`, shared per `(field, m)`.
pub fn unit_group(
    field: LocalFieldSpec,
    m: u32,
) -> Result<Arc<UnitGroupPresentation>, LocalFieldError> {
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(u) = cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get(&(field, m))
    {
        return Ok(u.clone());
    }
    let u = Arc::new(UnitGroupPresentation::build(quot_ring(field, m)?)?);
    Ok(cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .entry((field, m))
        .or_insert(u)
        .clone())
}

impl UnitGroupPresentation {
    fn build(ring: Arc<QuotRing>) -> Result<Self, LocalFieldError> {
        let too_large = || {
            LocalFieldError::TooLarge(format!(
                "{} at precision {}",
                ring.field(),
                ring.precision()
            ))
        };
        let size = ring.size().ok_or_else(too_large)?;
        if ring.unit_count().ok_or_else(too_large)? > MAX_UNITS {
            return Err(too_large());
        }
        let mut elems = Vec::new();
        let mut pos = vec![u32::MAX; size as usize];
        let mut decoded = Vec::new();
        for i in 0..size {
            let e = ring.from_index(i);
            if ring.is_unit(&e) {
                pos[i as usize] = elems.len() as u32;
                elems.push(i);
                decoded.push(e);
            }
        }
        let identity = pos[ring.index(&ring.one()) as usize] as usize;
        let pres = AbelianPresentation::build(elems.len(), identity, |i, j| {
            let prod = ring.mul(&decoded[i], &decoded[j]);
            pos[ring.index(&prod) as usize] as usize
        });
        let generators = pres
            .generators()
            .iter()
            .map(|&g| decoded[g].clone())
            .collect();
        Ok(UnitGroupPresentation {
            ring,
            elems,
            pos,
            pres,
            generators,
        })
    }

    pub fn ring(&self) -> &Arc<QuotRing> {
        &self.ring
    }

    pub fn generators(&self) -> &[RingElem] {
        &self.generators
    }

    pub fn orders(&self) -> &[u64] {
        self.pres.gen_orders()
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    /// Exponent of the group; every generator order divides it.
    pub fn exponent(&self) -> u64 {
        self.pres.exponent()
    }

    /// Position of a unit in the ascending enumeration.
    pub fn position(&self, u: &RingElem) -> Option<usize> {
        let i = self.ring.index(u) as usize;
        match self.pos.get(i) {
            Some(&p) if p != u32::MAX => Some(p as usize),
            _ => None,
        }
    }

    /// The unit at a position of the ascending enumeration.
    pub fn unit_at(&self, position: usize) -> RingElem {
        self.ring.from_index(self.elems[position])
    }

    /// Exponents of `u` on the generators.
    pub fn dlog(&self, u: &RingElem) -> Result<&[u64], LocalFieldError> {
        let p = self.position(u).ok_or(LocalFieldError::NotUnit)?;
        Ok(self.pres.dlog(p))
    }

    /// Exponents by enumeration position; the hot path of the Gauss sum.
    pub fn dlog_at(&self, position: usize) -> &[u64] {
        self.pres.dlog(position)
    }

    /// `Π g_i^{e_i}`.
    pub fn exp(&self, exps: &[u64]) -> RingElem {
        self.generators
            .iter()
            .zip(exps)
            .fold(self.ring.one(), |acc, (g, &e)| {
                self.ring.mul(&acc, &self.ring.pow(g, e as u128))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(s: &str, m: u32) -> Arc<UnitGroupPresentation> {
        unit_group(s.parse().unwrap(), m).unwrap()
    }

    #[test]
    fn units_mod_9() {
        let g = group("padic:p=3,f=1", 2);
        assert_eq!(g.orders(), &[6]);
        assert_eq!(g.generators()[0], g.ring().from_int(2));
    }

    #[test]
    fn units_mod_8() {
        let g = group("padic:p=2,f=1", 3);
        assert_eq!(g.orders(), &[2, 2]);
        assert_eq!(g.generators()[0], g.ring().from_int(3));
        assert_eq!(g.generators()[1], g.ring().from_int(5));
    }

    #[test]
    fn f4_units_cyclic() {
        let g = group("laurent:p=2,f=2", 1);
        assert_eq!(g.orders(), &[3]);
    }

    #[test]
    fn orders_multiply_to_unit_count() {
        for (s, m) in [
            ("padic:p=2,f=1", 5),
            ("padic:p=3,f=2", 3),
            ("laurent:p=2,f=2", 4),
            ("laurent:p=3,f=1", 3),
            ("padic:p=5,f=1", 3),
            ("padic:p=2,f=2", 3),
        ] {
            let g = group(s, m);
            let prod: u64 = g.orders().iter().product();
            assert_eq!(prod, g.ring().unit_count().unwrap(), "{s} m={m}");
            for (i, gen) in g.generators().iter().enumerate() {
                let mut e = vec![0; g.orders().len()];
                e[i] = 1;
                assert_eq!(g.dlog(gen).unwrap(), &e[..]);
            }
        }
    }

    #[test]
    fn dlog_inverts_exp() {
        let g = group("padic:p=3,f=2", 2);
        for pos in 0..g.order() {
            let u = g.unit_at(pos);
            let e = g.dlog(&u).unwrap().to_vec();
            assert_eq!(g.exp(&e), u);
        }
    }

    #[test]
    fn dlog_rejects_non_units() {
        let g = group("padic:p=3,f=1", 2);
        assert_eq!(g.dlog(&g.ring().from_int(3)), Err(LocalFieldError::NotUnit));
    }
}
