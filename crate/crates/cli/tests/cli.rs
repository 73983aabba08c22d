use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_balpow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(path).expect("golden file")
}

#[test]
fn search_k3_matches_golden() {
    let out = run(&["search", "--k", "3", "--n1-max", "100"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        golden("search_k3_n1max100.txt")
    );
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("matches the published list of 10"), "{err}");
}

#[test]
fn search_formats_agree() {
    let csv = run(&["search", "--k", "2", "--n1-max", "40", "--format", "csv"]);
    let csv = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(csv, "n1,n2,a1,a2\n1,1,0,0\n2,0,2,1\n2,2,3,2\n3,1,5,2\n");
    let json = run(&[
        "search", "--k", "2", "--n1-max", "40", "--format", "json", "--a1-max", "120",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["a1_max"], "120");
    assert_eq!(v["solutions"][3], serde_json::json!(["3", "1", "5", "2"]));
}

#[test]
fn search_k1_reports_diff_on_stderr() {
    let out = run(&["search", "--k", "1", "--n1-max", "100"]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("published (1,1,0) fails exact verification"),
        "{err}"
    );
    assert!(
        err.contains("computed (1,0,0) is not in the published list"),
        "{err}"
    );
}

#[test]
fn verify_exit_codes() {
    assert_eq!(
        run(&["verify", "--k", "3", "--solution", "3,3,6,2,1"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["verify", "--k", "3", "--solution", "3,3,6,2,2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["verify", "--k", "2", "--solution", "3,3,6,2,1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["verify", "--k", "1", "--solution", "1,1,0"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn bounds_json_lists_every_step() {
    let out = run(&["bounds", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 7);
    assert!(steps.iter().all(|s| s["within_window"] == true));
    assert_eq!(v["bound_table"].as_array().unwrap().len(), 3);
}

#[test]
fn precision_cap_exits_with_two() {
    let out = run(&["reduce", "--precision", "64", "--precision-cap", "128"]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn short_certify_is_incomplete() {
    let out = run(&["certify", "--n1-max", "50"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["verdict"].as_str().unwrap().starts_with("incomplete"));
}

#[test]
fn small_m_override_reduces_quickly() {
    let out = run(&["reduce", "--M", "1e6", "--format", "json"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["M"], "1000000");
}
