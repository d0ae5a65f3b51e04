use std::fmt;

use num_integer::Integer;

use super::CycNum;

/// `ζ_order^exp`, kept as an exponent so that products of character values
/// never touch polynomial arithmetic.
#[derive(Clone, Copy, Debug)]
pub struct RootOfUnity {
    order: u64,
    exp: u64,
}

impl RootOfUnity {
    pub fn new(order: u64, exp: i64) -> Self {
        assert!(order >= 1, "root of unity order must be positive");
        RootOfUnity {
            order,
            exp: exp.rem_euclid(order as i64) as u64,
        }
    }

    pub fn one() -> Self {
        RootOfUnity { order: 1, exp: 0 }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exp(&self) -> u64 {
        self.exp
    }

    /// Same root written with the smallest possible order.
    pub fn reduced(&self) -> Self {
        let g = self.exp.gcd(&self.order);
        RootOfUnity {
            order: self.order / g,
            exp: self.exp / g,
        }
    }

    /// Exact multiplicative order of the root.
    pub fn exact_order(&self) -> u64 {
        self.reduced().order
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0
    }

    /// Exponent of this root with respect to `ζ_n`; `n` must be a multiple
    /// of the exact order.
    pub fn exponent_at(&self, n: u64) -> Option<u64> {
        let r = self.reduced();
        if !n.is_multiple_of(r.order) {
            return None;
        }
        Some(r.exp * (n / r.order))
    }

    pub fn mul(&self, other: &RootOfUnity) -> RootOfUnity {
        let n = self.order.lcm(&other.order);
        let e = (self.exp as u128 * (n / self.order) as u128
            + other.exp as u128 * (n / other.order) as u128)
            % n as u128;
        RootOfUnity {
            order: n,
            exp: e as u64,
        }
        .reduced()
    }

    pub fn inv(&self) -> RootOfUnity {
        RootOfUnity {
            order: self.order,
            exp: (self.order - self.exp) % self.order,
        }
    }

    pub fn pow(&self, k: i64) -> RootOfUnity {
        let e = (self.exp as i128 * k as i128).rem_euclid(self.order as i128);
        RootOfUnity {
            order: self.order,
            exp: e as u64,
        }
        .reduced()
    }

    pub fn to_cyc(&self, p: u64) -> CycNum {
        CycNum::root_of_unity(self.order, self.exp as i64, p)
    }
}

impl PartialEq for RootOfUnity {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.reduced(), other.reduced());
        a.order == b.order && a.exp == b.exp
    }
}

impl Eq for RootOfUnity {}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z{}^{}", self.order, self.exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_multiplies() {
        let a = RootOfUnity::new(6, 2);
        assert_eq!(a.reduced().order(), 3);
        assert_eq!(a, RootOfUnity::new(3, 1));
        let b = RootOfUnity::new(4, 1);
        let c = a.mul(&b);
        assert_eq!(c.order(), 12);
        assert!(a.mul(&a.inv()).is_one());
        assert_eq!(RootOfUnity::new(5, 3).pow(-1), RootOfUnity::new(5, 2));
    }
}
