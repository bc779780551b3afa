use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn descent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_descent")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn copy_fixture(name: &str, into: &Path) -> PathBuf {
    let dst = into.join(Path::new(name).file_name().unwrap());
    std::fs::create_dir_all(&dst).unwrap();
    for f in ["curve.json", "certificate.json"] {
        std::fs::copy(fixtures().join(name).join(f), dst.join(f)).unwrap();
    }
    dst
}

#[test]
fn analyze_216663() {
    let o = descent(&["analyze", path_str(&fixtures().join("examples/216663"))]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["ker_theta_dr"], 5);
    assert_eq!(v["verdict"], "FINITE");
    assert_eq!(v["dim_A"], 6);
}

#[test]
fn analyze_10651_as_tsv() {
    let o = descent(&["analyze", path_str(&fixtures().join("examples/10651")), "--format", "tsv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "10651.a.10651.1\t2\tNO_RWP\t8\t7\tINCONCLUSIVE");
}

#[test]
fn crude_path() {
    let dir = fixtures().join("crude/g3-crude-one-rwp");
    let v = stdout_json(&descent(&["analyze", path_str(&dir), "--path", "crude"]));
    assert_eq!(v["crude_bound"], 10);
    assert_eq!(v["threshold_crude"], 11);
    assert_eq!(v["verdict"], "FINITE");
    let dir = fixtures().join("crude/g3-crude-no-rwp");
    let v = stdout_json(&descent(&["analyze", path_str(&dir), "--path", "crude"]));
    assert_eq!(v["crude_bound"], 19);
    assert_eq!(v["verdict"], "INCONCLUSIVE");
    assert_eq!(v["conditional_bk_dim"], 5);
}

#[test]
fn refined_path_needs_an_ordinary_model() {
    let o = descent(&["analyze", path_str(&fixtures().join("crude/g3-crude-one-rwp"))]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "NotOrdinaryPresentation");
}

#[test]
fn mismatched_certificate() {
    let curve = fixtures().join("examples/216663/curve.json");
    let cert = fixtures().join("examples/10651/certificate.json");
    let o = descent(&["analyze", "--curve", path_str(&curve), "--certificate", path_str(&cert)]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "CurveMismatch");
    assert_eq!(e["category"], "schema");
}

#[test]
fn missing_file_is_reported() {
    let o = descent(&["analyze", "/nonexistent/dir"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "IoError");
}

#[test]
fn missing_rank() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = copy_fixture("examples/216663", tmp.path());
    let path = dir.join("certificate.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["metadata"]["rank_upper"] = Value::Null;
    std::fs::write(&path, v.to_string()).unwrap();
    let o = descent(&["analyze", path_str(&dir)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "MissingRank");
}

#[test]
fn precision_out_of_range() {
    let dir = fixtures().join("examples/216663");
    assert!(!descent(&["analyze", path_str(&dir), "--precision", "32"]).status.success());
    assert!(!descent(&["analyze", path_str(&dir), "--precision", "8192"]).status.success());
    let v = stdout_json(&descent(&["analyze", path_str(&dir), "--precision", "1024"]));
    assert_eq!(v["ker_theta_dr"], 5);
    assert_eq!(v["precision"], 1024);
}

#[test]
fn output_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("r.json");
    let o = descent(&["analyze", path_str(&fixtures().join("examples/216663")), "--out", path_str(&out)]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["verdict"], "FINITE");
}

#[test]
fn validate_main_fixtures() {
    for name in ["216663", "10651", "g3-one-rwp", "g3-no-rwp"] {
        let o = descent(&["validate", path_str(&fixtures().join("examples").join(name))]);
        assert!(o.status.success(), "{name}");
        assert_eq!(stdout_json(&o)["all_pass"], true);
    }
}

#[test]
fn validate_planted_bad_element() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = copy_fixture("examples/216663", tmp.path());
    let path = dir.join("certificate.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // θ itself is not a square locally.
    v["basis"].as_array_mut().unwrap().push(serde_json::json!([[["0", "1"], 1]]));
    std::fs::write(&path, v.to_string()).unwrap();
    let o = descent(&["validate", path_str(&dir)]);
    assert_eq!(o.status.code(), Some(1));
    let r = stdout_json(&o);
    assert_eq!(r["all_pass"], false);
    let failing: Vec<u64> = r["elements"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["pass"] == false)
        .map(|e| e["index"].as_u64().unwrap())
        .collect();
    assert_eq!(failing, vec![6]);
}

#[test]
fn validate_empty_basis() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = copy_fixture("examples/216663", tmp.path());
    let path = dir.join("certificate.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["basis"] = serde_json::json!([]);
    std::fs::write(&path, v.to_string()).unwrap();
    let o = descent(&["validate", path_str(&dir)]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let o = descent(&["analyze", path_str(&dir)]);
    assert_eq!(stdout_json(&o)["ker_theta_dr"], 0);
}

#[test]
fn batch_with_corrupt_certificate() {
    let tmp = tempfile::tempdir().unwrap();
    copy_fixture("examples/216663", tmp.path());
    copy_fixture("examples/10651", tmp.path());
    let bad = tmp.path().join("broken");
    std::fs::create_dir(&bad).unwrap();
    std::fs::copy(fixtures().join("examples/216663/curve.json"), bad.join("curve.json")).unwrap();
    let text = std::fs::read_to_string(fixtures().join("examples/216663/certificate.json")).unwrap();
    std::fs::write(bad.join("certificate.json"), &text[..text.len() / 3]).unwrap();
    let o = descent(&["batch", "--fixtures-dir", path_str(tmp.path()), "--jobs", "4"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["summary"], serde_json::json!({"FINITE": 1, "INCONCLUSIVE": 1, "ERROR": 1}));
    let broken = v["entries"].as_array().unwrap().iter().find(|e| e["name"] == "broken").unwrap();
    assert_eq!(broken["error"]["error"], "SchemaError");
}

#[test]
fn batch_empty_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let o = descent(&["batch", "--fixtures-dir", path_str(tmp.path()), "--format", "tsv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.ends_with("# FINITE=0 INCONCLUSIVE=0 ERROR=0\n"));
}
