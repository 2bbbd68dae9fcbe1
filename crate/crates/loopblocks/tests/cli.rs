use std::path::PathBuf;
use std::process::{Command, Output};

use loopblocks::blocks::BlockStructure;
use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopblocks")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn blocks_json_schema_and_round_trip() {
    let o = cli(&["blocks", "--group", "D6", "--cut", "orient:gx=0,gy=0,n=2,s=+-", "--json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["total_dof"], 108);
    let first = &v["blocks"][0];
    for key in ["label", "rows", "cols", "mult"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert!(first["rows"]["coeff"].is_u64() && first["rows"]["gpow"].is_u64());
    let bs: BlockStructure = serde_json::from_value(v).unwrap();
    assert_eq!(bs.recompute_total_dof(), 108);
}

#[test]
fn blocks_text_lists_the_topological_part() {
    let o = cli(&["blocks", "--group", "D6", "--cut", "orient:gx=1,gy=1,n=1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("C^{18x18} + 2 C^{9x9}"), "{}", stdout(&o));
}

#[test]
fn json_to_file() {
    let path = tmp("chartable.json");
    let o = cli(&["chartable", "--group", "Q8", "--json", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["order"], 8);
    assert_eq!(v["indicators"].as_array().unwrap().last().unwrap(), -1);
}

#[test]
fn degeneracies() {
    assert_eq!(stdout(&cli(&["gsd", "--group", "S3", "--surface", "genus:1"])).trim(), "8");
    assert_eq!(stdout(&cli(&["gsd", "--group", "Z2", "--surface", "klein"])).trim(), "4");
    assert_eq!(stdout(&cli(&["gsd", "--group", "A4", "--surface", "sphere"])).trim(), "1");
}

#[test]
fn fusion_and_smatrix() {
    let o = cli(&["fusion", "--group", "S3", "--a", "[1]:2", "--b", "[1]:2", "--c", "[1]:1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1");
    let o = cli(&["smatrix", "--group", "D8", "--json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["anyons"].as_array().unwrap().len(), 22);
}

#[test]
fn tee_and_entropy() {
    let o = cli(&["tee", "--group", "D6", "--anyon", "[r]:1", "--json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let want = 2.0 * 6f64.ln() - 2.0 * 2f64.ln();
    assert!((v["tee"].as_f64().unwrap() - want).abs() < 1e-12);

    let state = tmp("state.json");
    std::fs::write(
        &state,
        r#"{"amplitudes":[{"orbit":[0,0],"sector":[0,0],"values":[1.0]},{"orbit":[1,1],"sector":[0,0],"values":[1.0]}]}"#,
    )
    .unwrap();
    let o = cli(&["entropy", "--group", "Z2", "--state", state.to_str().unwrap(), "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["correction"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn gauge_blocks_agree_with_degeneracy() {
    let o = cli(&["gauge-blocks", "--group", "S3", "--cut", "orient:gx=0,gy=0,n=2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("Σ x·y = 8"));
}

#[test]
fn oracle_checks() {
    for check in ["blocks", "gaugedof", "flatcount"] {
        let o = cli(&["oracle", "--group", "S3", "--lattice", "klein:2", "--check", check]);
        assert!(o.status.success(), "{check}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn verify_small_group() {
    let o = cli(&["verify", "--group", "S3", "--max-surface", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("all suites passed"));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["blocks", "--group", "Q9"]).status.code(), Some(1));
    assert_eq!(cli(&["blocks", "--group", "Z2", "--cut", "lens:q=4,p=2"]).status.code(), Some(1));
    assert_eq!(cli(&["blocks"]).status.code(), Some(64));
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn threads_flag() {
    let o = cli(&["--threads", "2", "oracle", "--group", "Z2", "--lattice", "torus:3"]);
    assert!(o.status.success());
}
