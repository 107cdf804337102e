use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_packpress"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("--config").arg(config).arg("--out").arg(out).args(extra).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn doubling_pressure_writes_rows_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&configs().join("doubling_pressure.json"), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("results.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("n,n_max,eps,sample_size,pool,alpha,"));
    assert_eq!(lines.count(), 9);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "pressure");
    assert_eq!(manifest["config"]["scale"]["window"], 1);
    assert_eq!(manifest["cells"].as_array().unwrap().len(), 9);
    for name in ["results.csv", "results.json", "certificates.json", "manifest.json"] {
        assert!(manifest["artifacts"].as_array().unwrap().iter().any(|a| a == name), "{name}");
    }
}

#[test]
fn vp_check_on_the_shift_reports_a_gap_column() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&configs().join("shift_vp.json"), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("results.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let gap = header.iter().position(|h| *h == "gap").unwrap();
    for line in csv.lines().skip(1) {
        let g: f64 = line.split(',').nth(gap).unwrap().parse().unwrap();
        assert!(g.abs() <= 1e-10, "{line}");
    }
}

#[test]
fn oracle_config_matches() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&configs().join("shift_oracle.json"), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("results.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 21);
    assert!(rows.as_array().unwrap().iter().all(|r| r["ok"] == true));
}

#[test]
fn increasing_eps_exits_two_with_its_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.json",
        "{\n  \"command\": \"pressure\",\n  \"system\": { \"space\": \"symbolic\", \"alphabet\": 2 },\n  \"scale\": {\n    \"n\": [4],\n    \"eps\": [0.1, 0.2]\n  }\n}\n",
    );
    let o = run(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json:6:"), "{err}");
    assert!(err.contains("strictly decreasing"), "{err}");
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn unknown_command_and_torus_oracle_are_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let unknown = write(tmp.path(), "u.json", r#"{"command": "entropy", "system": {"space": "symbolic", "alphabet": 2}, "scale": {"n": [3], "eps": [0.1]}}"#);
    assert_eq!(run(&unknown, &tmp.path().join("a"), &[]).status.code(), Some(2));
    let torus = write(
        tmp.path(),
        "t.json",
        r#"{"command": "oracle", "system": {"space": "torus", "maps": [{"kind": "affine", "slopes": [2]}]}, "scale": {"n": [3], "eps": [0.1]}}"#,
    );
    let o = run(&torus, &tmp.path().join("b"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("symbolic"));
}

#[test]
fn unwritable_output_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = write(tmp.path(), "file", "");
    let o = run(&configs().join("shift_vp.json"), &blocker.join("sub"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_lower_bound_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "vp.json",
        r#"{"command": "vp-check", "system": {"space": "symbolic", "alphabet": 2},
            "scale": {"n": [5], "eps": [0.2]}, "checks": {"lower_slack": -1.0, "katok": false}}"#,
    );
    let o = run(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(tmp.path().join("out/manifest.json").exists());
}

#[test]
fn flags_override_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &configs().join("shift_potential.json"),
        tmp.path(),
        &["--seed", "11", "--threads", "2", "--strategy", "greedy", "--disjoint", "shared-sample"],
    );
    assert_eq!(o.status.code(), Some(0));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 11);
    assert_eq!(manifest["config"]["disjoint"], "shared-sample");
    assert!(fs::read_to_string(tmp.path().join("results.csv")).unwrap().contains("shared-sample"));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert_eq!(run(&configs().join("torus_katok.json"), &a, &["--threads", "1"]).status.code(), Some(0));
    assert_eq!(run(&configs().join("torus_katok.json"), &b, &["--threads", "4"]).status.code(), Some(0));
    assert_eq!(run(&a.join("manifest.json"), &c, &["--threads", "1"]).status.code(), Some(0));
    let read = |d: &Path| fs::read(d.join("results.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(read(&a), read(&c));
}

#[test]
fn local_pressure_and_properties_run() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&configs().join("shift_local.json"), &tmp.path().join("l"), &[]);
    assert_eq!(o.status.code(), Some(0));
    let traces = fs::read_to_string(tmp.path().join("l/traces.csv")).unwrap();
    assert!(traces.starts_with("n,eps,atom,depth,ball_mass,f_n,quotient"));
    let measure: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("l/measure.json")).unwrap()).unwrap();
    assert_eq!(measure.as_array().unwrap().len(), 729);
    let p = run(&configs().join("properties.json"), &tmp.path().join("p"), &[]);
    assert_eq!(p.status.code(), Some(0));
}
