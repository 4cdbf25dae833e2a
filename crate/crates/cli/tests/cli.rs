use std::process::{Command, Output};

use serde_json::Value;

fn quiddity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quiddity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let out = quiddity(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn value(doc: &Value, row: usize, key: &str) -> String {
    doc["rows"][row]["values"][key].as_str().expect("decimal string").to_owned()
}

#[test]
fn count_with_all_engines() {
    let doc = json(&["count", "--modulus", "4", "--n", "5", "--epsilon", "-1", "--engine", "all"]);
    assert_eq!(value(&doc, 0, "eps=-1"), "20");
    assert_eq!(doc["rows"][0]["agree"], Value::Bool(true));
    assert_eq!(doc["rows"][0]["engine"], "formula,recursion,oracle");
    assert_eq!(doc["params"]["modulus"], 4);
}

#[test]
fn sigma_with_all_engines() {
    let doc = json(&["sigma", "--p", "3", "--r", "2", "--n", "6", "--ell", "2", "--engine", "all"]);
    assert_eq!(value(&doc, 0, "ell=2"), "81");
    assert_eq!(doc["rows"][0]["agree"], Value::Bool(true));
}

#[test]
fn composite_modulus_multiplies_components() {
    let get = |m: &str| {
        let doc = json(&["count", "--modulus", m, "--n", "5", "--epsilon", "-1", "--engine", "oracle"]);
        value(&doc, 0, "eps=-1").parse::<u64>().unwrap()
    };
    let formula = json(&["count", "--modulus", "12", "--n", "5", "--epsilon", "-1"]);
    assert_eq!(value(&formula, 0, "eps=-1").parse::<u64>().unwrap(), get("4") * get("3"));
    assert_eq!(get("12"), get("4") * get("3"));
}

#[test]
fn sigma_table_grid() {
    let out = quiddity(&["table", "sigma", "--p", "2", "--r", "3", "--n-max", "10", "--output", "csv"]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(header, ["n", "ell=1", "ell=2", "ell=3", "engine", "agree"]);
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 5);
    assert_eq!(&records[0][0], "2");
    assert_eq!(&records[0][3], "1");
    assert_eq!(&records[4][0], "10");
}

#[test]
fn quiddity_table_grid_agrees() {
    let doc = json(&["table", "quiddity", "--modulus", "9", "--n-min", "2", "--n-max", "8", "--engine", "all"]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for row in rows {
        assert_eq!(row["values"].as_object().unwrap().len(), 2);
        assert_eq!(row["agree"], Value::Bool(true));
    }
    assert_eq!(value(&doc, 4, "eps=-1"), "999");
    assert_eq!(value(&doc, 4, "eps=+1"), "702");
}

#[test]
fn json_round_trip_is_exact() {
    let doc = json(&["count", "--modulus", "27", "--n", "30", "--epsilon", "1"]);
    let text = value(&doc, 0, "eps=+1");
    assert!(text.len() > 20, "count should exceed u64: {text}");
    let parsed: num_bigint::BigUint = text.parse().unwrap();
    assert_eq!(parsed.to_string(), text);
    let again: Value = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(again, doc);
}

#[test]
fn general_target_and_pi_engines() {
    let doc = json(&["count", "--modulus", "9", "--n", "6", "--target", "1,1,0,1", "--engine", "all"]);
    assert_eq!(doc["rows"][0]["engine"], "recursion,oracle");
    let doc = json(&["pi", "--modulus", "8", "--n-max", "6", "--target", "-1,2,2,-5", "--engine", "all"]);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 4);
    assert_eq!(doc["rows"][0]["values"].as_object().unwrap().len(), 8);
    let doc = json(&["tau", "--p", "5", "--r", "1", "--n", "7", "--epsilon", "-1", "--engine", "all"]);
    assert_eq!(doc["rows"][0]["agree"], Value::Bool(true));
}

#[test]
fn exit_codes() {
    assert_eq!(quiddity(&["--help"]).status.code(), Some(0));
    assert_eq!(quiddity(&["--version"]).status.code(), Some(0));
    assert_eq!(quiddity(&["count", "--nope"]).status.code(), Some(1));
    assert_eq!(quiddity(&["count", "--modulus", "1", "--n", "3"]).status.code(), Some(1));
    assert_eq!(quiddity(&["count", "--modulus", "9", "--n", "0"]).status.code(), Some(1));
    assert_eq!(quiddity(&["count", "--modulus", "9", "--n", "3", "--epsilon", "2"]).status.code(), Some(1));

    let bad_det = quiddity(&["count", "--modulus", "9", "--n", "4", "--target", "2,0,0,2"]);
    assert_eq!(bad_det.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_det.stderr).contains("determinant"));

    let gate = quiddity(&["pi", "--modulus", "9", "--n", "5", "--epsilon", "1", "--classes"]);
    assert_eq!(gate.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&gate.stderr).contains("p >= 5"));

    assert_eq!(quiddity(&["sigma", "--p", "2", "--r", "2", "--n", "5"]).status.code(), Some(1));
    let formula_only = quiddity(&["pi", "--modulus", "9", "--n", "5", "--epsilon", "1", "--engine", "formula"]);
    assert_eq!(formula_only.status.code(), Some(1));
}

#[test]
fn budget_override_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_quiddity"))
        .args(["count", "--modulus", "9", "--n", "6", "--epsilon", "1", "--engine", "oracle"])
        .env("QUIDDITY_MAX_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn verify_subset() {
    let out = quiddity(&["verify", "--suite", "uv-products", "--suite", "crt", "--output", "json"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let suites = doc["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 2);
    assert!(suites.iter().all(|s| s["passed"] == Value::Bool(true)));
    assert_eq!(quiddity(&["verify", "--suite", "nope"]).status.code(), Some(1));
}
