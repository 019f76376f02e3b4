use std::process::{Command, Output};

use serde_json::Value;

fn addlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_addlab")).args(args).env_remove("ADDLAB_SEED").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn payload(out: &Output) -> Value {
    json(out)["payload"]["data"].clone()
}

#[test]
fn construct_dimensions() {
    for (args, dim) in [
        (vec!["construct", "--family", "antisym", "--d", "4"], 6),
        (vec!["construct", "--family", "parthasarathy", "--d", "3"], 4),
        (vec!["construct", "--family", "bell-extension", "--d", "6", "--n", "2"], 17),
    ] {
        let out = addlab(&[&args[..], &["--restarts", "8"]].concat());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let data = payload(&out);
        assert_eq!(data["dim"], dim);
        assert!(data["orthonormalityResidual"].as_f64().unwrap() < 1e-10);
    }
}

#[test]
fn construct_rejects_bad_spec() {
    let out = addlab(&["construct", "--family", "bell-extension", "--d", "6", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = addlab(&["construct", "--family", "nonsense", "--d", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let out =
        addlab(&["verify", "--family", "antisym-subspace", "--d", "8", "--n", "26", "--p", "3", "--restarts", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let env = json(&out);
    assert_eq!(env["command"], "verify");
    assert_eq!(env["payload"]["type"], "witness");
    assert_eq!(env["payload"]["data"]["analytic"]["breaks"], true);
    assert_eq!(env["payload"]["data"]["violationCertified"], true);

    let out =
        addlab(&["verify", "--family", "antisym-subspace", "--d", "8", "--n", "25", "--p", "3", "--restarts", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(payload(&out)["analytic"]["breaks"], false);

    let out = addlab(&["verify", "--family", "parthasarathy", "--d", "2", "--p", "3", "--m", "0.5", "--restarts", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(payload(&out)["analytic"]["breaks"], false);

    let out = addlab(&["verify", "--family", "antisym", "--d", "5", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn scan_csv() {
    let out = addlab(&["scan", "--family", "bell-extension", "--p-grid", "3", "--d-grid", "4..12"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["family", "p", "d", "member", "n_or_x0", "C", "c", "margin"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 9);
    let first = rows.iter().find(|r| &r[3] == "true").unwrap();
    assert_eq!(&first[2], "8");

    let out = addlab(&["scan", "--family", "antisym-subspace", "--p-grid", "2.5,3", "--d-grid", "4..7,10"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 2 * 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("p=3 d0=7"));
}

#[test]
fn scan_json_metadata() {
    let out =
        addlab(&["scan", "--family", "antisym-subspace", "--p-grid", "3", "--d-grid", "4..12", "--format", "json"]);
    assert!(out.status.success());
    let data = payload(&out);
    assert_eq!(data["metadata"][0]["d0"], 7);
    assert_eq!(data["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn scan_rejects_empty_grid() {
    let out = addlab(&["scan", "--family", "bell-extension", "--p-grid", "3", "--d-grid", ""]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_targets() {
    let out = addlab(&["oracle", "--target", "antisym-sup", "--d", "5"]);
    assert!(out.status.success());
    assert!((payload(&out)["value"].as_f64().unwrap() - 0.5).abs() <= 1e-6);
    let out = addlab(&["oracle", "--target", "md", "--d", "2"]);
    assert!((payload(&out)["value"].as_f64().unwrap() - 0.5).abs() <= 1e-6);
    let out = addlab(&["oracle", "--target", "subspace-sup", "--d", "4", "--n", "3"]);
    assert!((payload(&out)["value"].as_f64().unwrap() - 0.5).abs() <= 1e-6);
    let out = addlab(&["oracle", "--target", "unknown", "--d", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seeded_runs_are_reproducible() {
    let args = ["oracle", "--target", "md", "--d", "3", "--seed", "42", "--restarts", "16"];
    let a = payload(&addlab(&args));
    let b = payload(&addlab(&args));
    assert_eq!(a, b);
    let out = Command::new(env!("CARGO_BIN_EXE_addlab"))
        .args(["census", "--p", "3", "--d", "10"])
        .env("ADDLAB_SEED", "9")
        .output()
        .unwrap();
    let env = json(&out);
    assert_eq!(env["seed"], 9);
    assert_eq!(env["payload"]["data"]["lFormula"], 6);
    assert_eq!(env["payload"]["data"]["strictCount"], 5);
}

#[test]
fn floats_carry_seventeen_digits() {
    let out = addlab(&["census", "--p", "3", "--d", "8"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"threshold\"")).unwrap();
    let number = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = number.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{number}");
}

#[test]
fn envelope_matches_schema_keys() {
    let schema: Value = serde_json::from_str(include_str!("../../../docs/schema.json")).unwrap();
    let required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let env = json(&addlab(&["census", "--p", "3", "--d", "8"]));
    for key in required {
        assert!(env.get(key).is_some(), "missing {key}");
    }
}
