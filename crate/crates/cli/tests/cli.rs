use std::path::Path;
use std::process::{Command, Output};

fn study(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_study")).args(args).current_dir(cwd).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const INTERP: &str = r#"{"kind":"interp_convergence",
  "basis":{"family":"polyharmonic","n":1,"p":3},
  "datum":{"n":1,"kind":"gaussian","params":{"sigma":1}},
  "ladder":{"start":2,"count":5}}"#;

#[test]
fn validate_accepts_good_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", INTERP);
    let out = study(&["validate", &cfg], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("ok interp_convergence"), "{text}");
}

#[test]
fn validate_rejects_missing_symbol() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &INTERP.replace("interp_convergence", "scheme_convergence"));
    let out = study(&["validate", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("symbol"));
}

#[test]
fn validate_rejects_short_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &INTERP.replace("\"count\":5", "\"count\":3"));
    assert_eq!(study(&["validate", &cfg], dir.path()).status.code(), Some(1));
}

#[test]
fn missing_file_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = study(&["validate", "nowhere.json"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere.json"));
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", INTERP);
    let out = study(&["run", &cfg, "--out", "res", "--jobs", "1", "--tol", "0.3"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let entries: Vec<_> = std::fs::read_dir(dir.path().join("res")).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1);
    let run = &entries[0];
    assert!(run.file_name().unwrap().to_string_lossy().starts_with("interp_convergence-"));
    let csv = std::fs::read_to_string(run.join("errors.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("h,error,order"));
    assert_eq!(csv.lines().count(), 6);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(run.join("result.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["rate_tolerance"], 0.3);
    assert!(run.join("errors.svg").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("[pass]"));
}

#[test]
fn constants_prints_report() {
    let dir = tempfile::tempdir().unwrap();
    let basis = write(dir.path(), "b.json", r#"{"family":"polyharmonic","n":1,"p":3}"#);
    let symbol = write(dir.path(), "s.json", r#"{"kind":"heat"}"#);
    let out = study(&["constants", &basis, "--symbol", &symbol], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let g = json["g_upper"].as_f64().unwrap();
    assert!((g - 1.0 / 12.0).abs() < 1e-8, "{g}");
    assert_eq!(json["kappa"], 4.0);
}

#[test]
fn constants_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let basis = write(dir.path(), "b.json", r#"{"family":"multiquadric","n":1,"c":1}"#);
    let out = study(&["constants", &basis, "--out", "k"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("k/constants.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("name,value"));
    assert!(dir.path().join("k/constants.json").exists());
}
