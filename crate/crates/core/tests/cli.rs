use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigidity-lab")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn identity_is_a_domain_error() {
    let out = run(&["hyperbolic", "--matrix", &fixture("identity.json")]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"], "NotHyperbolic");
    assert_eq!(v["schema"], "v1");
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempdir();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "[[1, 2], [3]]").unwrap();
    let out = run(&["hyperbolic", "--matrix", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "MalformedInput");
    assert_eq!(run(&["hyperbolic", "--matrix", "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(run(&["nonres", "--family", "C", "--rank", "2", "--highest-weight", "1,x"]).status.code(), Some(1));
    assert_eq!(run(&["hyperbolic"]).status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_rigidity-lab"))
        .env("RIGIDITY_LAB_THREADS", "zero")
        .args(["gcd-rows", "--family", "A", "--rank", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lift_on_cat_fixture() {
    let out = run(&[
        "lift",
        "--presentation",
        &fixture("z2.json"),
        "--rho",
        &fixture("rho_cat.json"),
        "--defects",
        &fixture("defects.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["q"], 1);
    assert!(v["eta"].is_object());
    let out = run(&[
        "lift",
        "--presentation",
        &fixture("z2.json"),
        "--rho",
        &fixture("rho_trivial.json"),
        "--defects",
        &fixture("defects_unit.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "UNSOLVABLE");
}

#[test]
fn semiconj_writes_grid() {
    let dir = tempdir();
    let w = dir.join("w.json");
    let out = run(&[
        "semiconj",
        "--matrix",
        &fixture("cat.json"),
        "--field",
        &fixture("cat_field.json"),
        "--tol",
        "1e-8",
        "--grid",
        "16",
        "--out",
        w.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert!(v["residual_sup"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["grid_shape"], serde_json::json!([16, 16]));
    assert!(v.get("w").is_none());
    let grid: Value = serde_json::from_str(&std::fs::read_to_string(&w).unwrap()).unwrap();
    assert_eq!(grid["values"].as_array().unwrap().len(), 256);
}

#[test]
fn tables() {
    let cone = ["cone-cert", "--f", &fixture("cat.json"), "--g", &fixture("identity.json"), "--eps", "1.0", "--table"];
    let short = String::from_utf8(run(&cone).stdout).unwrap();
    for label in ["r ", "C ", "λ ", "δ0", "T ", "N "] {
        assert!(short.contains(label), "{short}");
    }
    let mut long_args = cone.to_vec();
    long_args.push("--verbose");
    let long = String::from_utf8(run(&long_args).stdout).unwrap();
    assert!(long.contains("0.3819660112501"), "{long}");
    assert!(!short.contains("0.3819660112501"));

    let nonres = String::from_utf8(run(&["--table", "nonres", "--family", "C", "--rank", "2", "--highest-weight", "1,0"]).stdout).unwrap();
    assert!(nonres.contains("classification  weak"), "{nonres}");

    let out = run(&["--table", "hyperbolic", "--matrix", &fixture("identity.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("NotHyperbolic"));
}

#[test]
fn remaining_subcommands() {
    let cat = fixture("cat.json");
    for args in [
        vec!["splitting", "--matrix", &cat],
        vec!["regularity", "--matrix", &cat],
        vec!["gcd-rows", "--family", "C", "--rank", "3"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert_eq!(json(&out)["schema"], "v1");
    }
    let v = json(&run(&["rank1", "--vectors", &fixture("rank1.json")]));
    assert_eq!(v["is_rank_one"], true);
    let v = json(&run(&["nilpotent", "--algebra", &fixture("heisenberg.json"), "--automorphism", &fixture("heis_aut.json")]));
    assert_eq!(v["degree"], 2);
    assert_eq!(v["layers"]["layers"][0]["center_moduli"], serde_json::json!([1.0]));
}

fn tempdir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("rigidity-lab-cli-{}-{:?}", std::process::id(), std::thread::current().id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
