//! Browser bindings: a periodic-point portrait of a map on the 2-torus, full
//! JSON problem reports, and orbits that escape a union of cosets.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use skewtorus::lattice::IntMatrix;
use skewtorus::torus::{periodic_level_with_budget, AffineTorusMap, ScalarGroupElement};
use skewtorus_cli::spec::parse_rational;
use skewtorus_cli::{parse_error_report, parse_spec, run, Options};

pub const MAX_PORTRAIT_LEVEL: u32 = 400;

fn map_2d(m: [i32; 4], t1: &str, t2: &str) -> Result<AffineTorusMap, String> {
    let matrix = IntMatrix::from_rows(&[[m[0] as i64, m[1] as i64], [m[2] as i64, m[3] as i64]]);
    let y = [t1, t2]
        .iter()
        .map(|t| parse_rational(t).map(|r| ScalarGroupElement::new(r, Vec::new())))
        .collect::<Result<Vec<_>, _>>()?;
    AffineTorusMap::new(matrix, y).map_err(|e| e.to_string())
}

/// Periods on the level-`N` grid, row-major by `(a_1, a_2)`; 0 marks a point off every cycle.
pub fn portrait_json(m: [i32; 4], t1: &str, t2: &str, level: u32) -> Result<String, String> {
    if level == 0 || level > MAX_PORTRAIT_LEVEL {
        return Err(format!("level must be between 1 and {MAX_PORTRAIT_LEVEL}"));
    }
    let phi = map_2d(m, t1, t2)?;
    let n = level as u64;
    let pts = periodic_level_with_budget(&phi, n, n * n).map_err(|e| e.to_string())?;
    let mut periods = vec![0u64; (n * n) as usize];
    let mut by_period = std::collections::BTreeMap::new();
    for (x, p) in &pts {
        let a = x.numerators_at(n).expect("point lies at level N");
        periods[(a[0] * n + a[1]) as usize] = *p;
        *by_period.entry(p.to_string()).or_insert(0u64) += 1;
    }
    Ok(json!({
        "level": n,
        "periodic": pts.len(),
        "pointsByPeriod": by_period,
        "periods": periods,
    })
    .to_string())
}

/// Runs a full problem description; parse failures come back as an error report.
pub fn analyze_json(spec: &str, verify: bool) -> String {
    match parse_spec(spec) {
        Ok(s) => {
            let opts = Options {
                verify,
                ..Options::default()
            };
            run(&s, &opts).report.to_string()
        }
        Err(e) => parse_error_report(&e).to_string(),
    }
}

/// Escaping orbit for the linear map `m` against `cosets` (JSON array of
/// `{characters, targets}`).
pub fn avoid_json(m: [i32; 4], cosets: &str, budget: u32) -> Result<String, String> {
    let cosets: Value = serde_json::from_str(cosets).map_err(|e| format!("cosets: {e}"))?;
    let spec = json!({
        "dimension": 2,
        "matrix": [[m[0], m[1]], [m[2], m[3]]],
        "queries": [{ "type": "avoid", "cosets": cosets, "budget": budget }],
    });
    let parsed = parse_spec(&spec.to_string()).map_err(|e| e.message)?;
    let out = run(&parsed, &Options { verify: true, ..Options::default() });
    let entry = &out.report["results"][0];
    if entry["status"] != "ok" {
        return Err(entry["error"]["message"].as_str().unwrap_or("query failed").to_string());
    }
    let mut result = entry["result"].clone();
    result["verified"] = json!(out.verification_failures.is_empty());
    Ok(result.to_string())
}

#[wasm_bindgen]
pub fn portrait(a: i32, b: i32, c: i32, d: i32, t1: &str, t2: &str, level: u32) -> Result<String, JsError> {
    portrait_json([a, b, c, d], t1, t2, level).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn analyze(spec: &str, verify: bool) -> String {
    analyze_json(spec, verify)
}

#[wasm_bindgen]
pub fn avoid(a: i32, b: i32, c: i32, d: i32, cosets: &str, budget: u32) -> Result<String, JsError> {
    avoid_json([a, b, c, d], cosets, budget).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn version() -> String {
    skewtorus_cli::TOOL_VERSION.to_string()
}
