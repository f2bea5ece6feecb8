use serde_json::Value;
use skewtorus_web::{analyze_json, avoid_json, portrait_json};

#[test]
fn cat_map_portrait_mod_five() {
    let v: Value = serde_json::from_str(&portrait_json([2, 1, 1, 1], "0", "0", 5).unwrap()).unwrap();
    assert_eq!(v["periodic"], 25);
    let periods = v["periods"].as_array().unwrap();
    assert_eq!(periods.len(), 25);
    // (1/5, 2/5) sits on a 2-cycle
    assert_eq!(periods[5 + 2], 2);
    assert_eq!(periods[0], 1);
}

#[test]
fn doubling_leaves_gaps() {
    let v: Value = serde_json::from_str(&portrait_json([2, 0, 0, 1], "0", "1/2", 4).unwrap()).unwrap();
    let zeros = v["periods"].as_array().unwrap().iter().filter(|p| *p == 0).count();
    assert_eq!(zeros, 12);
}

#[test]
fn portrait_rejects_bad_input() {
    assert!(portrait_json([1, 1, 1, 1], "0", "0", 5).is_err());
    assert!(portrait_json([1, 0, 0, 1], "0", "0", 0).is_err());
    assert!(portrait_json([1, 0, 0, 1], "x", "0", 3).is_err());
    assert!(portrait_json([1, 0, 0, 1], "1/2", "0", 3).is_err());
}

#[test]
fn analyze_round_trip() {
    let r: Value = serde_json::from_str(&analyze_json(
        r#"{"dimension": 2, "matrix": [[0, 1], [-1, 1]], "queries": [{"type": "skewLaurent"}]}"#,
        true,
    ))
    .unwrap();
    assert_eq!(r["results"][0]["result"]["primitive"], false);
    assert_eq!(r["verification"]["passed"], true);
    let r: Value = serde_json::from_str(&analyze_json("{", false)).unwrap();
    assert_eq!(r["error"]["kind"], "ParseError");
}

#[test]
fn avoiding_orbit() {
    let cosets = r#"[{"characters": [[1, 0]], "targets": ["0/1"]}, {"characters": [[0, 1]], "targets": ["0/1"]}]"#;
    let v: Value = serde_json::from_str(&avoid_json([2, 1, 1, 1], cosets, 200).unwrap()).unwrap();
    assert_eq!(v["verified"], true);
    for x in v["orbit"].as_array().unwrap() {
        assert_ne!(x[0], "0/1");
        assert_ne!(x[1], "0/1");
    }
    assert!(avoid_json([2, 1, 1, 1], "[", 200).is_err());
}
