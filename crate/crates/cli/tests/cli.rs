use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn morass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morass"))
        .args(args)
        .env_remove("MORASS_FIXTURE_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn check_m1_passes() {
    let m1 = fixtures().join("m1.json");
    let out = morass(&["morass", "check", m1.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "morass-report/1");
    assert_eq!(v["passed"], true);
    assert_eq!(v["fixtures"][0]["name"], "m1");
    assert_eq!(v["fixtures"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn check_reads_the_fixture_directory_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_morass"))
        .args(["morass", "check", "--format", "text"])
        .env("MORASS_FIXTURE_DIR", fixtures())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("m2-k2-phi1234: pass"), "{text}");
    assert!(text.ends_with("PASS\n"));
}

#[test]
fn failing_axioms_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m1-short.json");
    std::fs::write(&path, r#"{"schema":"morass-gap1/1","theta":1,"phi":[1,2],"families":{"0,1":[[0]]}}"#).unwrap();
    let out = morass(&["morass", "check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn malformed_spec_reports_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"schema\":\"morass-gap1/1\",\n\"theta\":1,\n\"phi\":[1,\"two\"],\"families\":{}}").unwrap();
    let out = morass(&["morass", "check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("`phi[1]`") && err.contains("line 3"), "{err}");
}

#[test]
fn recursion_suite_on_generated_fixtures() {
    let out = morass(&["lemmas", "run", "--suite", "4.1", "--bounds", "theta=2,phi=3,kappa=1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let reports = v["results"].as_array().unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r["suite"] == "4.1" && r["instances"].as_u64().unwrap() > 0));
    assert_eq!(v["config"]["suite"], "4.1");
}

#[test]
fn unknown_suite_is_an_error() {
    let out = morass(&["lemmas", "run", "--suite", "6.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["lemmas", "run", "--suite", "all", "--bounds", "theta=2,phi=3,kappa=1,alphabet=2"];
    let (a, b) = (morass(&args), morass(&args));
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn generic_extract_two_set_example() {
    let m2 = fixtures().join("m2-k2-phi1234.json");
    let out = morass(&[
        "generic",
        "extract",
        "--variant",
        "chain",
        "--file",
        m2.to_str().unwrap(),
        "--dense",
        "add-column(1)",
        "--dense",
        "separate(0,1,0)",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["objects"]["sets"]["1"], serde_json::json!([0]));
    assert_eq!(v["results"]["objects"]["sets"]["0"], serde_json::json!([]));
}

#[test]
fn unrealizable_dense_list_has_its_own_exit_code() {
    let m2 = fixtures().join("m2-k2-phi1234.json");
    let out = morass(&[
        "generic",
        "extract",
        "--variant",
        "chain",
        "--file",
        m2.to_str().unwrap(),
        "--dense",
        "grow-difference(1,0,3)",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["results"]["unrealizable"]["spec"], "grow-difference(1,0,3)");
}

#[test]
fn forcing_enumerate_counts_levels() {
    let m1 = fixtures().join("m1.json");
    let out = morass(&["forcing", "enumerate", "--variant", "chain", m1.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let levels = v["results"][0]["listing"]["p_levels"].as_array().unwrap();
    assert_eq!(levels[0]["count"], 5);
    assert!(morass(&["forcing", "enumerate", m1.to_str().unwrap()]).status.code() == Some(2));
}

#[test]
fn generate_writes_loadable_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = morass(&["morass", "generate", "--kind", "gap2", "--bounds", "theta=2,phi=3,kappa=1", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let count = json(&out)["results"]["count"].as_u64().unwrap();
    assert!(count > 0);
    let check = Command::new(env!("CARGO_BIN_EXE_morass")).args(["morass", "check"]).env("MORASS_FIXTURE_DIR", dir.path()).output().unwrap();
    assert_eq!(check.status.code(), Some(0));
    assert_eq!(json(&check)["fixtures"].as_array().unwrap().len() as u64, count);
}
