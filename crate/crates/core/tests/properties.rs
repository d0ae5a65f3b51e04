use epsilon_core::coeff::CycNum;
use epsilon_core::localfield::{k_mul, unit_group, KElement, LocalFieldSpec};
use proptest::prelude::*;

fn cyc(level: u64, p: u64, counts: Vec<i64>, shift: i64) -> CycNum {
    let x = CycNum::from_counts(level, p, &counts[..level as usize]);
    &x * &CycNum::p_power(p, shift)
}

fn arb_pair() -> impl Strategy<Value = (CycNum, CycNum)> {
    (1u64..=36, prop::sample::select(vec![2u64, 3, 5, 7])).prop_flat_map(|(n, p)| {
        let counts = || prop::collection::vec(-4i64..=4, 36);
        (counts(), counts(), -2i64..=2, -2i64..=2)
            .prop_map(move |(a, b, s, t)| (cyc(n, p, a, s), cyc(n, p, b, t)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn norm_is_multiplicative((a, b) in arb_pair()) {
        prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
    }

    #[test]
    fn units_are_closed((a, b) in arb_pair()) {
        let ua = a.is_unit();
        let ub = b.is_unit();
        prop_assert_eq!((&a * &b).is_unit(), ua && ub);
        if ua {
            let inv = a.inverse().unwrap();
            prop_assert!(inv.is_unit());
            prop_assert_eq!(&inv * &a, CycNum::one(a.p()));
        }
    }

    #[test]
    fn dlog_is_a_homomorphism(
        field in prop::sample::select(vec!["padic:p=3,f=1", "padic:p=5,f=1", "padic:p=3,f=2", "laurent:p=2,f=2"]),
        m in 1u32..=3,
        x in 0u64..1_000_000,
        y in 0u64..1_000_000,
    ) {
        let k: LocalFieldSpec = field.parse().unwrap();
        let g = unit_group(k, m).unwrap();
        let n = g.order();
        let (u, v) = (g.unit_at(x as usize % n), g.unit_at(y as usize % n));
        let uv = k_mul(&KElement::new(k, 0, m, u.clone()).unwrap(), &KElement::new(k, 0, m, v.clone()).unwrap())
            .unwrap();
        let (du, dv, duv) = (g.dlog(&u).unwrap(), g.dlog(&v).unwrap(), g.dlog(uv.unit()).unwrap());
        for i in 0..du.len() {
            prop_assert_eq!((du[i] + dv[i]) % g.orders()[i], duv[i]);
        }
        prop_assert_eq!(g.exp(du), u);
    }
}
