use std::fs;
use std::path::PathBuf;

use epsilon_core::swan::{
    artin_character, builtin_cyclotomic_filtration, conductor_pairing, cyclotomic_transfer,
    swan_character, swan_pairing, FiltrationFixture, RamFiltration,
};
use num_bigint::BigInt;
use num_rational::BigRational;

fn int(v: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn load(name: &str) -> (FiltrationFixture, RamFiltration) {
    let text = fs::read_to_string(data_dir().join(format!("{name}.json"))).unwrap();
    let fx: FiltrationFixture = serde_json::from_str(&text).unwrap();
    let f = RamFiltration::from_fixture(&fx).unwrap();
    (fx, f)
}

#[test]
fn every_fixture_loads_with_integral_characters() {
    let mut seen = 0;
    for entry in fs::read_dir(data_dir()).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let f =
            RamFiltration::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let a = artin_character(&f).unwrap();
        let sw = swan_character(&f).unwrap();
        for g in 0..f.group().order() {
            assert!(a.at(g).is_integer() && sw.at(g).is_integer());
        }
        seen += 1;
    }
    assert_eq!(seen, 6);
}

#[test]
fn cyclotomic_fixtures_match_builtin() {
    for (name, p, n) in [
        ("c2_q3_zeta3", 3, 1),
        ("c4_q5_zeta5", 5, 1),
        ("c6_q3_zeta9", 3, 2),
        ("c18_q3_zeta27", 3, 3),
        ("c20_q5_zeta25", 5, 2),
    ] {
        let (fx, f) = load(name);
        let b = builtin_cyclotomic_filtration(p, n).unwrap();
        assert_eq!(fx, b.to_fixture(name));
        for chi in f.group().abelian_characters().unwrap() {
            let v: Vec<_> = chi.iter().map(|r| r.to_cyc(p)).collect();
            let mc = cyclotomic_transfer(p, n, &chi).unwrap();
            assert_eq!(conductor_pairing(&f, &v).unwrap(), int(mc.conductor()));
            assert_eq!(swan_pairing(&f, &v).unwrap(), int(mc.swan()));
        }
    }
}

#[test]
fn s3_fixture_values() {
    let (_, f) = load("s3_wild_c3");
    assert!(!f.group().is_abelian());
    assert_eq!(
        artin_character(&f).unwrap().integer_values(),
        vec![7, -2, -2, -1, -1, -1]
    );
    let sw = swan_character(&f).unwrap();
    assert_eq!(sw.integer_values(), vec![2, -1, -1, 0, 0, 0]);
}
