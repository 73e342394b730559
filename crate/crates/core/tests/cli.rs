use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shiftkern"))
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("shiftkern-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_scenario(name: &str, truncation: usize, u: &str) -> PathBuf {
    let text = format!(
        r#"{{
  "id": "{name}",
  "truncation": {truncation},
  "symbol": {{ "type": "inner", "theta": {{ "z_power": 2 }} }},
  "perturbation": {{ "terms": [ {{
    "u": {{ "truncation": 8, "coeffs": {u} }},
    "v": {{ "truncation": 8, "coeffs": [[0, 0], [0, 0], [-1, 0], [0.5, 0]] }}
  }} ] }}
}}"#
    );
    let path = tmp(&format!("{name}.json"));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn passing_scenario_exits_zero() {
    let f = scenarios().join("inner_z2.json");
    let o = run(&["run", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("verdict: PASS"));
}

#[test]
fn headroom_violation_exits_two() {
    let f = write_scenario("low", 10, "[[1, 0]]");
    let o = run(&["run", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("headroom"), "{}", stderr(&o));
}

#[test]
fn truncation_flag_overrides_file() {
    let f = write_scenario("override", 32, "[[1, 0]]");
    let o = run(&["kernel", f.to_str().unwrap(), "--truncation", "12"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("headroom"));
}

#[test]
fn non_orthonormal_u_exits_two() {
    let f = write_scenario("scaled-u", 32, "[[2, 0]]");
    let o = run(&["defect", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("perturbation invariant"), "{}", stderr(&o));
}

#[test]
fn schema_error_exits_two() {
    let path = tmp("bad.json");
    std::fs::write(&path, r#"{"id": "x", "truncation": 32, "bogus": 1}"#).unwrap();
    let o = run(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let missing = run(&["run", tmp("missing.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn failing_verification_exits_one() {
    // the displayed system for a non-dividing conjugate inner symbol does not hold
    let f = scenarios().join("conj_inner_not_divides.json");
    let o = run(&["run", f.to_str().unwrap(), "--no-stabilize"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("stated system"), "{}", stderr(&o));
}

#[test]
fn json_reports_are_deterministic() {
    let f = scenarios().join("conj_inner_divides.json");
    let a = tmp("a.json");
    let b = tmp("b.json");
    for out in [&a, &b] {
        let o = run(&[
            "run",
            f.to_str().unwrap(),
            "--json-out",
            out.to_str().unwrap(),
            "--seed",
            "5",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["seed"], 5);
    assert_eq!(v["stabilization"]["stable"], true);
}

#[test]
fn kernel_dump_contains_frame() {
    let f = scenarios().join("zero_rank2.json");
    let out = tmp("kernel.json");
    let o = run(&[
        "kernel",
        f.to_str().unwrap(),
        "--no-stabilize",
        "--json-out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["subspace"]["dim"], 30);
    assert!(v["report"]["stabilization"].is_null());
    assert_eq!(v["subspace"]["frame"].as_array().unwrap().len(), 30);
}

#[test]
fn verify_paper_exit_code_matches_report() {
    let out = tmp("suite.json");
    let o = run(&["verify-paper", "--json-out", out.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let pass = v["pass"].as_bool().unwrap();
    assert_eq!(o.status.code(), Some(if pass { 0 } else { 1 }));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().last().unwrap().starts_with("verdict: "));
    let rows = v["rows"].as_array().unwrap();
    let ids: std::collections::BTreeSet<_> = rows.iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids.len(), rows.len(), "row ids are unique");
    for r in rows {
        assert!(!r["anchor"].as_str().unwrap().is_empty());
    }
}
