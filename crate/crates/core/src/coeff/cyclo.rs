//! Per-level cyclotomic data: `Φ_N` and the reductions of `x^j mod Φ_N`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug)]
pub(crate) struct Cyclo {
    pub n: u64,
    pub phi: usize,
    /// `Φ_N`, monic, low-degree-first, length `phi + 1`.
    pub poly: Vec<i64>,
    /// `x^j mod Φ_N` for `0 <= j < N`, as sparse `(index, coefficient)` lists.
    pub powers: Vec<Vec<(usize, i64)>>,
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Exact division of integer polynomials, `b` monic.
fn exact_div(a: &[i64], b: &[i64]) -> Vec<i64> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![0i64; a.len() - db];
    for k in (db..a.len()).rev() {
        let c = r[k];
        q[k - db] = c;
        if c != 0 {
            for j in 0..=db {
                r[k - db + j] -= c * b[j];
            }
        }
    }
    debug_assert!(r.iter().all(|&c| c == 0));
    q
}

fn cyclotomic_poly(n: u64) -> Vec<i64> {
    // x^n - 1 divided by every Φ_d with d | n, d < n.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in divisors(n) {
        if d < n {
            num = exact_div(&num, &get(d).poly);
        }
    }
    num
}

fn build(n: u64) -> Cyclo {
    let poly = cyclotomic_poly(n);
    let phi = poly.len() - 1;
    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    if phi > 0 {
        cur[0] = 1;
    }
    for _ in 0..n {
        powers.push(
            cur.iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (i, c))
                .collect(),
        );
        // multiply by x and reduce the overflowing top coefficient
        let top = cur[phi - 1];
        for i in (1..phi).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for i in 0..phi {
                cur[i] -= top * poly[i];
            }
        }
    }
    Cyclo {
        n,
        phi,
        poly,
        powers,
    }
}

static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Cyclo>>>> = OnceLock::new();

pub(crate) fn get(n: u64) -> Arc<Cyclo> {
    assert!(n >= 1, "cyclotomic level must be positive");
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&n) {
        return c.clone();
    }
    // Built outside the lock: `cyclotomic_poly` recurses into `get`.
    let c = Arc::new(build(n));
    cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .entry(n)
        .or_insert(c)
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(get(1).poly, vec![-1, 1]);
        assert_eq!(get(3).poly, vec![1, 1, 1]);
        assert_eq!(get(4).poly, vec![1, 0, 1]);
        assert_eq!(get(6).poly, vec![1, -1, 1]);
        assert_eq!(get(9).poly, vec![1, 0, 0, 1, 0, 0, 1]);
        // Φ_105 is the first with a coefficient of absolute value 2
        assert!(get(105).poly.contains(&-2));
    }

    #[test]
    fn degree_is_phi() {
        for n in 1..60 {
            let phi = (1..=n).filter(|k| k.gcd(&n) == 1).count();
            assert_eq!(get(n).phi, phi);
        }
    }

    #[test]
    fn power_table_wraps() {
        let c = get(12);
        assert_eq!(c.powers[0], vec![(0, 1)]);
        // ζ_12^6 = -1
        assert_eq!(c.powers[6], vec![(0, -1)]);
    }
}
