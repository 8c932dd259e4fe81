// Copyright 2026 The mmfock Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn mmfock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmfock")).args(args).env("RUST_LOG", "off").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = mmfock(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn characterize_reproduces_table_row() {
    let csv = stdout(&["characterize", "--preset", "superradiant", "--N", "100", "--D", "10", "--d", "4"]);
    assert!(csv.starts_with("# mmfock "));
    assert!(csv.contains("# config: "));
    let rows = data_rows(&csv);
    let c: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    for (got, want) in c.iter().zip([0.902, 0.984, 0.996, 0.998]) {
        assert!((got - want).abs() < 0.002);
    }
}

#[test]
fn twin_fock_qfi() {
    let json: Value = serde_json::from_str(&stdout(&["qfi", "--twin-fock", "10", "--format", "json"])).unwrap();
    assert_eq!(json["rows"][0]["Q"], Value::from(60.0));
    assert_eq!(json["rows"][0]["Q_occupations"], Value::from(60.0));
    let occ = stdout(&["qfi", "--occupations", "5"]);
    assert_eq!(data_rows(&occ)[0][3], "6.00000000000e1");
}

#[test]
fn effective_state_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    let p = path.to_str().unwrap();
    stdout(&[
        "effective-state", "--preset", "superradiant", "--N", "4", "--D", "6", "--d", "2", "--format", "json", "--output", p,
    ]);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["state"]["d"], Value::from(2));
    let csv = stdout(&["cfi", "--state", p, "--phi", "0.0001", "--granularity", "NR"]);
    let row = &data_rows(&csv)[0];
    let (c, q): (f64, f64) = (row[3].parse().unwrap(), row[4].parse().unwrap());
    assert!((c - q).abs() < 1e-3 * q);
    // Outputs never replace inputs.
    let before = fs::read_to_string(&path).unwrap();
    let out = mmfock(&["qfi", "--state", p, "--output", p]);
    assert!(!out.status.success());
    assert_eq!(before, fs::read_to_string(&path).unwrap());
}

#[test]
fn failures_are_reported_as_json() {
    let out = mmfock(&["correlator", "--preset", "superradiant", "--N", "1", "--left", "1:0,2:0", "--right", "1:0,2:0"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], Value::from("order_exceeds_photons"));
    let out = mmfock(&["cfi", "--input", "psi2 3", "--phi", "0.1", "--eta", "1.5"]);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], Value::from("invalid_argument"));
}

#[test]
fn oracle_columns_agree() {
    let csv = stdout(&[
        "correlator", "--spec", r#"{"N": 2, "omega": [0, 0.1, 0.3], "gamma": [0, 1.5, 2.0]}"#, "--left", "1:0.2", "--right",
        "2:0", "--oracle",
    ]);
    let row = &data_rows(&csv)[0];
    assert!(row[5].parse::<f64>().unwrap() < 1e-12);
    let csv = stdout(&["photon-number", "--preset", "kerr", "--N", "3", "--U", "0.2", "--gamma", "2", "--oracle"]);
    let row = &data_rows(&csv)[0];
    let (n, o): (f64, f64) = (row[2].parse().unwrap(), row[4].parse().unwrap());
    assert!((n - o).abs() < 1e-12);
}

#[test]
fn cache_build_and_inspect() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["cache", "build", "--preset", "superradiant", "--N", "5", "--D", "3", "--dir", d];
    let first = data_rows(&stdout(&args));
    assert_eq!(first[0][3], "no");
    let second = data_rows(&stdout(&args));
    assert_eq!(second[0][3], "yes");
    let inspect = data_rows(&stdout(&["cache", "inspect", &first[0][0]]));
    assert_eq!(inspect[0], vec!["mpfr320", "5", "3", "2", &first[0][2]]);
}

#[test]
fn job_count_does_not_change_output() {
    let base = ["cfi-scan", "--input", "psi1 3", "--phi-steps", "7", "--eta", "1,0.9,0.8"];
    let one = stdout(&[&base[..], &["--jobs", "1"]].concat());
    let many = stdout(&[&base[..], &["--jobs", "3"]].concat());
    assert_eq!(one, many);
    assert_eq!(data_rows(&one).len(), 2 * 3 * 7);
}
