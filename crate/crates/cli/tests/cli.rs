use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn epsilon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epsilon"))
        .args(args)
        .output()
        .expect("spawn epsilon")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
}

#[test]
fn quadratic_character_of_q3() {
    let v = json(&epsilon(&[
        "compute",
        "--field",
        "padic:p=3,f=1",
        "--char",
        "a=1;exps=1",
    ]));
    assert_eq!(v["value"]["text"], "1+2*z3");
    assert_eq!(v["norm"], "3");
    assert_eq!(v["is_unit"], true);
    assert_eq!(v["swan"], 0);
}

#[test]
fn trivial_character() {
    let v = json(&epsilon(&["compute", "--field", "padic:p=3,f=1"]));
    assert_eq!(v["value"]["text"], "-1");
    assert_eq!(v["value"]["root_of_unity"], serde_json::json!([2, 1]));
    assert_eq!(v["epsilon_full"]["text"], "1");
    let v = json(&epsilon(&[
        "compute",
        "--field",
        "padic:p=3,f=1",
        "--vol",
        "-1/3*z9^2",
    ]));
    assert_eq!(v["value"]["text"], "1/3*z9^2");
}

#[test]
fn job_file_and_flag_override() {
    let dir = std::env::temp_dir().join(format!("epsilon-cli-job-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let job = dir.join("job.json");
    std::fs::write(&job, r#"{"field":"padic:p=5,f=1","char":"a=1;exps=1"}"#).unwrap();
    let from_file = json(&epsilon(&["compute", "--job", job.to_str().unwrap()]));
    assert_eq!(from_file["field"], "padic:p=5,f=1");
    assert_eq!(from_file["is_unit"], true);
    let overridden = json(&epsilon(&[
        "compute",
        "--job",
        job.to_str().unwrap(),
        "--char",
        "trivial",
    ]));
    assert_eq!(overridden["value"]["text"], "-1");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn parse_errors_exit_2() {
    for args in [
        &["compute", "--field", "bogus"][..],
        &[
            "compute",
            "--field",
            "padic:p=3,f=1",
            "--char",
            "a=1;exps=1,1",
        ],
        &["compute", "--field", "padic:p=3,f=1", "--vol", "0"],
        &["compute"],
        &["verify", "--suite", "bogus"],
        &["swan", "--p", "3"],
        &["nonsense"],
    ] {
        let out = epsilon(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn verify_suite_passes() {
    let v = json(&epsilon(&["verify", "--suite", "formulary", "--seed", "1"]));
    assert_eq!(v["suite"], "formulary");
    assert_eq!(v["failed"], 0);
    assert_eq!(v["total"], 200);
}

#[test]
fn table_rows() {
    let rows = |args: &[&str]| {
        let out = epsilon(args);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        let mut r = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(
            r.headers().unwrap().iter().collect::<Vec<_>>(),
            [
                "field",
                "a",
                "chi_pi",
                "unit_exps",
                "n_psi",
                "m0",
                "value",
                "norm"
            ]
        );
        r.records().map(|x| x.unwrap()).collect::<Vec<_>>()
    };
    let one = rows(&["table", "--field", "padic:p=3,f=1", "--a", "1"]);
    assert_eq!(one.len(), 2);
    assert_eq!(&one[1][6], "1+2*z3");
    assert_eq!(
        rows(&["table", "--field", "padic:p=3,f=1", "--a", "2"]).len(),
        6
    );
    assert!(rows(&["table", "--field", "padic:p=2,f=1", "--a", "1", "--exact"]).is_empty());
}

#[test]
fn swan_builtin_and_fixture() {
    let v = json(&epsilon(&["swan", "--p", "3", "--n", "2"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["swan"], serde_json::json!([4, 0, -2, 0, -2, 0]));
    let path = fixture("s3_wild_c3.json");
    let v = json(&epsilon(&["swan", "--fixture", path.to_str().unwrap()]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["artin"], serde_json::json!([7, -2, -2, -1, -1, -1]));
    assert_eq!(v["swan"], serde_json::json!([2, -1, -1, 0, 0, 0]));
}

#[test]
fn reduction_checks() {
    let v = json(&epsilon(&[
        "reduce",
        "--field",
        "padic:p=3,f=1",
        "--char",
        "a=1;exps=1",
    ]));
    assert_eq!(v["passed"], true);
    let ls: Vec<u64> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["l"].as_u64().unwrap())
        .collect();
    assert_eq!(ls, [2, 5, 7, 11, 13]);
    let v = json(&epsilon(&[
        "reduce",
        "--field",
        "laurent:p=2,f=2",
        "--char",
        "a=2;exps=1",
        "--l",
        "3,7",
    ]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn output_is_byte_stable() {
    for args in [
        &["verify", "--suite", "units", "--seed", "7"][..],
        &["table", "--field", "laurent:p=2,f=1", "--a", "4"],
    ] {
        let base = epsilon(args).stdout;
        assert!(!base.is_empty());
        assert_eq!(epsilon(args).stdout, base);
        for t in ["1", "4"] {
            let mut with = vec!["--threads", t];
            with.extend_from_slice(args);
            assert_eq!(epsilon(&with).stdout, base, "{with:?}");
        }
    }
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("epsilon-cli-out-{}.json", std::process::id()));
    let out = epsilon(&[
        "--out",
        path.to_str().unwrap(),
        "compute",
        "--field",
        "padic:p=3,f=1",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["value"]["text"], "-1");
    std::fs::remove_file(&path).unwrap();
}
