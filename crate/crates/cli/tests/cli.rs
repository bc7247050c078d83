use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ambient_core::expr::Expr;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn ambient(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ambient"));
    c.args(args);
    for var in ["METRIC", "AMBIGUITY", "RHO_ORDER", "LOG_ORDER", "X_ORDER", "MODE", "SCHEMA", "OUT"] {
        c.env_remove(format!("AMBIENT_{var}"));
    }
    c
}

fn run(args: &[&str]) -> Output {
    ambient(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A rational from a report string.
fn rational(s: &str) -> Value {
    Value::String(Expr::parse(s, 1).unwrap().constant_value().unwrap().to_string())
}

/// The terms of a reported jet of total degree at most `k`, keyed by exponent.
fn terms_upto(jet: &Value, k: u64) -> Vec<(Vec<u64>, String)> {
    let mut out: Vec<(Vec<u64>, String)> = jet["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| (t["x"].as_array().unwrap().iter().map(|e| e.as_u64().unwrap()).collect::<Vec<_>>(), t["c"].as_str().unwrap().to_string()))
        .filter(|(x, _)| x.iter().sum::<u64>() <= k)
        .collect();
    out.sort();
    out
}

fn scaled(terms: &[(Vec<u64>, String)], factor: &str) -> Vec<(Vec<u64>, String)> {
    terms
        .iter()
        .map(|(x, c)| (x.clone(), rational(&format!("({c})*({factor})")).as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn flat_expansion_has_no_higher_coefficients() {
    let r = json(&run(&["expand", "--metric", path(&fixture("flat4.toml")), "--rho-order", "2", "--x-order", "6"]));
    assert_eq!(r["log_free"], true);
    for c in r["coefficients"].as_array().unwrap() {
        let terms = c["jet"]["terms"].as_array().unwrap();
        let diagonal_metric = c["rho"] == 0 && c["log"] == 0 && c["block"] == "ij" && c["index"][0] == c["index"][1];
        if diagonal_metric {
            assert_eq!(terms.len(), 1);
            assert_eq!(terms[0]["c"], "1");
        } else {
            assert!(terms.is_empty(), "{c}");
        }
    }
    assert_eq!(r["obstruction"]["vanishes"], true);
}

#[test]
fn round_sphere_reports_a_vanishing_obstruction() {
    let r = json(&run(&["expand", "--metric", path(&fixture("sphere4.toml")), "--rho-order", "2", "--x-order", "6"]));
    assert_eq!(r["obstruction"]["vanishes"], true);
    assert_eq!(r["log_free"], true);
    let o = json(&run(&["obstruction", "--metric", path(&fixture("sphere4.toml"))]));
    assert_eq!(o["vanishes"], true);
}

#[test]
fn random_expansion_matches_the_golden_report() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/expand_random4.json");
    let out = run(&["expand", "--metric", path(&fixture("random4.toml")), "--rho-order", "2", "--x-order", "6"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), std::fs::read_to_string(golden).unwrap());
}

#[test]
fn golden_log_coefficients_are_multiples_of_the_obstruction() {
    let golden: Value = serde_json::from_str(
        &std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/expand_random4.json")).unwrap(),
    )
    .unwrap();
    let o = json(&run(&["obstruction", "--metric", path(&fixture("random4.toml"))]));
    let mut seen = 0;
    for c in golden["coefficients"].as_array().unwrap() {
        if c["block"] != "ij" || c["rho"] != 2 || c["log"] != 1 {
            continue;
        }
        let oc = o["obstruction"].as_array().unwrap().iter().find(|e| e["index"] == c["index"]).unwrap();
        let k = c["jet"]["order"].as_u64().unwrap().min(oc["jet"]["order"].as_u64().unwrap());
        assert_eq!(terms_upto(&c["jet"], k), scaled(&terms_upto(&oc["jet"], k), "-1/2"), "{}", c["index"]);
        seen += 1;
    }
    assert_eq!(seen, 10);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out = run(&["invariant", "--metric", path(&fixture("split4.toml")), "--x-order", "5", "--out", path(p)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn odd_dimension_obstruction_is_an_input_error() {
    let out = run(&["obstruction", "--metric", path(&fixture("odd5.toml"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n must be even"));
}

#[test]
fn obstruction_norm_schema_equals_the_base_norm() {
    let dir = tempfile::tempdir().unwrap();
    let schema = dir.path().join("schema.toml");
    std::fs::write(
        &schema,
        "[[invariant]]\nname = \"oo\"\nfactors = [{ tensor = \"obstruction\" }, { tensor = \"obstruction\" }]\npairs = [[0, 2], [1, 3]]\n",
    )
    .unwrap();
    let m = fixture("random4.toml");
    let inv = json(&run(&["invariant", "--metric", path(&m), "--schema", path(&schema), "--x-order", "6"]));
    let list = inv["invariants"].as_array().unwrap();
    assert_eq!(list.len(), 1);
    assert_eq!(list[0]["weight"], -8);
    let got = &list[0]["value"];
    let o = json(&run(&["obstruction", "--metric", path(&m), "--x-order", "6"]));
    let k = got["order"].as_u64().unwrap().min(o["norm"]["order"].as_u64().unwrap());
    assert!(!terms_upto(got, k).is_empty());
    assert_eq!(terms_upto(got, k), terms_upto(&o["norm"], k));
}

#[test]
fn check_passes_on_the_fixture_set() {
    let cases: &[(&str, &[&str])] = &[
        ("flat4.toml", &[]),
        ("sphere4.toml", &["--x-order", "6"]),
        ("split4.toml", &["--x-order", "6"]),
        ("random4.toml", &["--x-order", "6", "--ambiguity", "AMB"]),
        ("odd5.toml", &["--rho-order", "2"]),
    ];
    let amb = fixture("ambiguity4.toml");
    for (name, extra) in cases {
        let m = fixture(name);
        let mut args = vec!["check", "--metric", path(&m)];
        args.extend(extra.iter().map(|a| if *a == "AMB" { path(&amb) } else { *a }));
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let r: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(r["failed"], 0, "{name}");
        assert!(r["passed"].as_u64().unwrap() >= 3, "{name}");
    }
}

#[test]
fn check_passes_in_float_mode() {
    for name in ["sphere4.toml", "split4.toml"] {
        let out = run(&["check", "--metric", path(&fixture(name)), "--mode", "float", "--x-order", "6"]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let r: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(r["precision_bits"], 256);
        assert_eq!(r["failed"], 0, "{name}");
    }
}

#[test]
fn environment_supplies_defaults_and_flags_win() {
    let out = ambient(&["obstruction", "--x-order", "5"]).env("AMBIENT_METRIC", fixture("sphere4.toml")).output().unwrap();
    let r = json(&out);
    assert_eq!(r["x_order"], 5);
    let out = ambient(&["obstruction", "--metric", path(&fixture("sphere4.toml")), "--mode", "exact"])
        .env("AMBIENT_METRIC", "/nonexistent.toml")
        .env("AMBIENT_MODE", "float")
        .env("AMBIENT_X_ORDER", "5")
        .output()
        .unwrap();
    let r = json(&out);
    assert_eq!(r["mode"], "exact");
    assert_eq!(r["x_order"], 5);
    assert!(r.get("precision_bits").is_none());
}

#[test]
fn float_mode_reports_precision_and_accepts_analytic_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("exp.toml");
    let e = "\"exp(x1 - x2^2/2)\"";
    std::fs::write(
        &m,
        format!("dim = 4\nsignature = [4, 0]\ng = [[{e}, 0, 0, 0], [0, {e}, 0, 0], [0, 0, {e}, 0], [0, 0, 0, {e}]]\n"),
    )
    .unwrap();
    let out = run(&["obstruction", "--metric", path(&m)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exact mode"));
    let r = json(&run(&["obstruction", "--metric", path(&m), "--mode", "float"]));
    assert_eq!(r["precision_bits"], 256);
    assert_eq!(r["vanishes"], true);
    assert_eq!(r["trace_free"], true);
}

#[test]
fn malformed_inputs_exit_with_code_two_and_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("bad.toml");
    std::fs::write(&m, "dim = 4\nsignature = [4, 0]\ng = [[\"1 + * x1\", 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]\n")
        .unwrap();
    let out = run(&["expand", "--metric", path(&m)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.toml") && err.contains("g[1][1]"), "{err}");

    let out = run(&["expand", "--metric", path(&fixture("random4.toml")), "--rho-order", "3", "--x-order", "6"]);
    assert_eq!(out.status.code(), Some(2));

    let a = dir.path().join("a.toml");
    std::fs::write(&a, "A = [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]\n").unwrap();
    let out = run(&["check", "--metric", path(&fixture("flat4.toml")), "--ambiguity", path(&a)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace-free"));

    let s = dir.path().join("s.toml");
    std::fs::write(&s, "[[invariant]]\nname = \"x\"\nfactors = [{ tensor = \"curvature\" }]\npairs = [[0, 9]]\n").unwrap();
    let out = run(&["invariant", "--metric", path(&fixture("flat4.toml")), "--schema", path(&s)]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["expand"]);
    assert_eq!(out.status.code(), Some(2));
}
