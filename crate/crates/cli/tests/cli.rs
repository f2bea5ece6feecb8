use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn specs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/specs")
}

fn analyze_stdin(input: &str, args: &[&str]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_skewtorus"))
        .arg("analyze")
        .arg("-")
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn analyze_file(name: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewtorus"))
        .arg("analyze")
        .arg(specs_dir().join(name))
        .args(args)
        .output()
        .unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn jordan_map_is_not_primitive() {
    let out = analyze_file("jordan.json", &["--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let results = r["results"].as_array().unwrap();
    for q in &results[..2] {
        assert_eq!(q["status"], "ok");
        assert_eq!(q["result"]["primitive"], false);
        assert_eq!(q["result"]["sigmaOrder"], 6);
    }
    assert_eq!(results[2]["result"]["verdict"], "B");
    assert_eq!(r["verification"]["passed"], true);
}

#[test]
fn free_q_laurent_is_primitive() {
    let spec = r#"{"dimension": 1, "matrix": [[1]], "freeGenerators": ["q"],
        "translation": [{"free": {"q": "1"}}], "queries": [{"type": "skewLaurent", "shape": {"kind": "zero"}}]}"#;
    let out = analyze_stdin(spec, &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"][0]["result"]["primitive"], true);
    assert_eq!(r["results"][0]["result"]["witnesses"][0]["kind"], "noFixedCharacter");
}

#[test]
fn malformed_matrix_is_a_parse_error() {
    let out = analyze_stdin("{\n  \"dimension\": 2,\n  \"matrix\": [[1, 0, 0], [0, 1]]\n}", &[]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["error"]["kind"], "ParseError");
    assert_eq!(r["error"]["line"], 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("3:"));

    let out = analyze_stdin("{\"dimension\": 2, \"matrix\": [[1, 0], [0, 1]]", &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn query_errors_are_captured_per_query() {
    let spec = r#"{"dimension": 2, "matrix": [[2, 0], [0, 1]],
        "queries": [{"type": "skewPoly"}, {"type": "periodicPoints", "level": 4}, {"type": "oracle"},
                    {"type": "oracle", "level": 100000}]}"#;
    let out = analyze_stdin(spec, &[]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let kinds: Vec<&str> = r["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|q| q["error"]["kind"].as_str().unwrap_or("ok"))
        .collect();
    assert_eq!(kinds, ["NotAutomorphism", "ok", "MissingLevel", "BudgetExceeded"]);
    // x1 must be 0 under doubling mod 4, x2 is free
    assert_eq!(r["results"][1]["result"]["count"], 4);
}

#[test]
fn level_flag_fills_missing_levels() {
    let spec = r#"{"dimension": 2, "matrix": [[2, 1], [1, 1]], "queries": [{"type": "oracle"}]}"#;
    let out = analyze_stdin(spec, &["--level", "5", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"][0]["result"]["periodicCount"], 25);
    assert_eq!(r["options"]["level"], 5);
}

#[test]
fn reports_are_byte_identical() {
    for name in ["cat_map.json", "jordan.json", "quantum_plane.json", "root_of_unity.json"] {
        let a = analyze_file(name, &["--verify", "--seed", "1"]);
        let b = analyze_file(name, &["--verify", "--seed", "1"]);
        assert_eq!(a.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
}

#[test]
fn seed_does_not_change_results() {
    let a = report(&analyze_file("cat_map.json", &["--seed", "1"]));
    let b = report(&analyze_file("cat_map.json", &["--seed", "2"]));
    assert_eq!(a["results"], b["results"]);
    assert_eq!(b["options"]["seed"], 2);
}

#[test]
fn prime_budget_flag_reaches_the_search() {
    let a = report(&analyze_file("cat_map.json", &["--prime-budget", "7"]));
    let fam = &a["results"][0]["result"]["periodicFamily"];
    assert_eq!(fam["primeBudget"], 7);
    assert!(fam["certificates"].as_array().unwrap().iter().all(|c| c["prime"].as_u64().unwrap() <= 7));
}

#[test]
fn pretty_and_compact_agree() {
    let a = report(&analyze_file("jordan.json", &["--json"]));
    let b = report(&analyze_file("jordan.json", &["--pretty"]));
    assert_eq!(a, b);
}

#[test]
fn timings_are_opt_in() {
    assert!(report(&analyze_file("jordan.json", &[])).get("timings").is_none());
    let r = report(&analyze_file("jordan.json", &["--timings"]));
    assert_eq!(r["timings"].as_array().unwrap().len(), 3);
}

#[test]
fn big_integers_are_strings() {
    let spec = r#"{"dimension": 1, "matrix": [["-12345678901234567890123"]], "queries": [{"type": "analyze"}]}"#;
    let out = analyze_stdin(spec, &[]);
    let r = report(&out);
    assert_eq!(r["inputEcho"]["matrix"][0][0], "-12345678901234567890123");
    assert_eq!(r["results"][0]["result"]["det"], "-12345678901234567890123");
}

#[test]
fn schema_lists_every_query_type() {
    let text = std::fs::read_to_string(specs_dir().join("../problem.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let text = schema.to_string();
    for q in ["analyze", "periodicPoints", "dichotomy", "skewPoly", "skewLaurent", "oracle", "avoid"] {
        assert!(text.contains(&format!("\"{q}\"")), "{q} missing from schema");
    }
}
