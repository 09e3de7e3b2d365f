use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bpprg(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpprg"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn xor_mass_sits_on_the_top_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = bpprg(dir.path(), &["mass", "--family", "xor", "--n", "6"]);
    assert!(out.status.success());
    let doc = json(&dir.path().join("mass.json"));
    assert_eq!(doc["config"]["command"], "mass");
    let levels: Vec<f64> = doc["result"]["per_level"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(levels, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    assert_eq!(doc["result"]["total"], 1.0);
    assert!(fs::read_to_string(dir.path().join("mass.csv")).unwrap().starts_with("# bpprg-mass v1"));
}

#[test]
fn collision_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bpprg(dir.path(), &["lemma-check", "collision", "--trials", "1000", "--maxn", "14"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&dir.path().join("lemma-check-collision.json"))["result"]["violations"], 0);
}

#[test]
fn structural_checks_pass() {
    for check in ["interwoven", "charge", "sumproduct", "lambdalp", "chernoff"] {
        let dir = tempfile::tempdir().unwrap();
        let out = bpprg(dir.path(), &["lemma-check", check, "--trials", "60", "--maxn", "10"]);
        assert!(out.status.success(), "{check}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn prg_gen_is_reproducible() {
    let args = ["prg-gen", "--n", "40", "--threshold", "10", "--m-t", "5", "--m-x", "4", "--seed", "7", "--count", "4"];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(bpprg(a.path(), &args).status.success());
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "3"]);
    assert!(bpprg(b.path(), &threaded).status.success());
    let strip = |p: &Path| {
        let mut v = json(&p.join("prg-gen.json"));
        v["config"]["threads"] = Value::Null;
        v
    };
    assert_eq!(strip(a.path()), strip(b.path()));
    assert_eq!(fs::read(a.path().join("prg-gen.csv")).unwrap(), fs::read(b.path().join("prg-gen.csv")).unwrap());
}

#[test]
fn seed_hex_base_case_is_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    let out = bpprg(dir.path(), &["prg-gen", "--n", "8", "--threshold", "8", "--seed-hex", "b4"]);
    assert!(out.status.success());
    let doc = json(&dir.path().join("prg-gen.json"));
    assert_eq!(doc["result"]["outputs"][0]["bits"], "00101101");
}

#[test]
fn family_round_trip_through_file() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bpprg(dir.path(), &["family-gen", "--family", "mod3", "--n", "5"]).status.success());
    let file = dir.path().join("family-gen.bp.json");
    let out = bpprg(dir.path(), &["spectrum", "--bp", file.to_str().unwrap()]);
    assert!(out.status.success());
    let rows = json(&dir.path().join("spectrum.json"))["result"].as_array().unwrap().len();
    assert_eq!(rows, 32);
}

#[test]
fn samplers_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["sampler-verify", "--kind", "small-bias", "--n", "10", "--m", "6"][..],
        &["sampler-verify", "--kind", "kwise", "--n", "6", "--d", "1", "--k", "3", "--m", "8"],
        &["prg-test", "--family", "tribes", "--m", "2", "--threshold", "7", "--m-t", "3", "--m-x", "3"],
        &["growth-report", "--family", "tribes", "--m", "2"],
        &["lambda", "--family", "random3", "--n", "8"],
    ] {
        let out = bpprg(dir.path(), args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let growth = json(&dir.path().join("growth-report.json"));
    assert!(growth["result"]["note"].as_str().unwrap().contains("minimal C"));
}

#[test]
fn missing_program_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bpprg(dir.path(), &["mass"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bp FILE or --family NAME"));
}

#[test]
fn unknown_subcommand_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!bpprg(dir.path(), &["frobnicate"]).status.success());
}
