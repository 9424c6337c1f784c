//! The `cmpadic` binary: report shape, exit codes and table overrides.

use std::process::Command;

use cmpadic::modular::phi::table_text;
use cmpadic::modular::SUPPORTED_LEVELS;

fn cmpadic(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cmpadic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_tables(dir: &std::path::Path) {
    for level in SUPPORTED_LEVELS {
        std::fs::write(
            dir.join(format!("phi_{level}.txt")),
            table_text(level).unwrap(),
        )
        .unwrap();
    }
}

#[test]
fn selftest_report_shape() {
    let out = cmpadic(&["selftest", "--seed", "3"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["experiment"], "selftest");
    assert!(v["timing_ms"].is_null());
    assert_eq!(v["summary"]["fail"], 0);
    for case in v["cases"].as_array().unwrap() {
        for key in ["id", "inputs", "values", "verdict", "notes"] {
            assert!(case.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn corrupted_phi2_fails_selftest() {
    let dir = tempfile::tempdir().unwrap();
    write_tables(dir.path());
    let ok = cmpadic(&["selftest", "--phi-dir", dir.path().to_str().unwrap()]);
    assert!(ok.status.success());

    let path = dir.path().join("phi_2.txt");
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\n1 1 40773375\n"));
    std::fs::write(&path, text.replace("\n1 1 40773375\n", "\n1 1 -40773375\n")).unwrap();
    let out = cmpadic(&["selftest", "--phi-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let case = v["cases"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "modular_tables")
        .unwrap();
    assert_eq!(case["verdict"], "FAIL");
    assert!(
        case["notes"].as_str().unwrap().contains("modular identity"),
        "{case}"
    );
}

#[test]
fn csv_output_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = cmpadic(&[
        "warmup2",
        "--n",
        "1",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("experiment,id,verdict"));
    assert!(text.contains("warmup2,n=1,PASS"));
}

#[test]
fn bad_input_is_an_error() {
    let out = cmpadic(&["prop12", "--p", "7", "--nmax", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precondition"));
}
