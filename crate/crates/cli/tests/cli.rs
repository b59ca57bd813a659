use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke-lab")).args(args).env("HECKE_LAB_THREADS", "1").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn binomialsum_sweep_lists_every_weight() {
    let out = run(&["verify-lemma", "binomialsum", "--p", "3", "--f", "2", "--rmax", "18"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "hecke-lab/1");
    assert_eq!(v["rows"].as_array().unwrap().len(), 100);
    assert_eq!(v["rows"][0]["r"], serde_json::json!([9, 9]));
}

#[test]
fn requivzero_instance_passes() {
    let out = run(&["verify-theorem", "requivzero", "--p", "3", "--f", "2", "--r", "12,12", "--slope", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    let row = &json(&out)["rows"][0];
    for key in ["case", "params", "hypotheses", "integrality", "residual_nonzero_entries", "projection_match", "pass", "min_precision_slack"] {
        assert!(row.get(key).is_some(), "missing {key}");
    }
    assert_eq!(row["pass"], true);
    assert_eq!(row["residual_nonzero_entries"], 0);
}

#[test]
fn exceptional_boundary_is_reported_not_failed() {
    let out = run(&["verify-theorem", "except", "--p", "3", "--f", "1", "--r", "7", "--slope", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rows"][0]["status"], "outside-theorem-hypotheses");
}

#[test]
fn exit_codes() {
    // hypothesis violated
    let out = run(&["verify-theorem", "requivzero", "--r", "12,13"]);
    assert_eq!(out.status.code(), Some(2));
    // unknown subcommand and decimal slope
    assert_eq!(run(&["verify-everything"]).status.code(), Some(2));
    assert_eq!(run(&["verify-theorem", "requivzero", "--slope", "0.5"]).status.code(), Some(2));
    // precision too low to divide by p
    let out = run(&["verify-theorem", "requivzero", "--r", "12,12", "--N", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--N"));
    // the kernel lemma has a nontrivial kernel at (4,4)
    let out = run(&["verify-lemma", "eqsol-kernel", "--p", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let bad: Vec<&Value> =
        report["rows"].as_array().unwrap().iter().filter(|r| r["in_scope"] == true && r["kernel_trivial"] == false).collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0]["r"], serde_json::json!([4, 4]));
}

#[test]
fn output_is_deterministic() {
    let args = ["verify-theorem", "nonexcep", "--rmin", "11", "--rmax", "13", "--slope", "1/2,3/4", "--seed", "4"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = ["verify-lemma", "vanishing", "--N", "4", "--trials", "20", "--seed", "9"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn golden_file_mode() {
    let path = std::env::temp_dir().join(format!("hecke-lab-golden-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let args = ["find-cases", "middle1", "--rmin", "9", "--rmax", "14", "--slope", "3/4"];
    let out = run(&[&args[..], &["--out", p]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(run(&[&args[..], &["--golden", p]].concat()).status.code(), Some(0));
    std::fs::write(&path, "{}").unwrap();
    assert_eq!(run(&[&args[..], &["--golden", p]].concat()).status.code(), Some(1));
    let _ = std::fs::remove_file(&path);
}

#[test]
fn csv_and_text_formats() {
    let out = run(&["find-cases", "requivzero", "--rmin", "11", "--rmax", "20", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.split(',').any(|h| h == "r"));
    // r_0 + 3 r_1 ≡ 0 mod 8 in [11, 20]^2
    assert_eq!(lines.count(), 13);
    let out = run(&["verify-lemma", "xrinkernel", "--p", "5", "--f", "1", "--trials", "3", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("verify-lemma xrinkernel: pass"));
}

#[test]
fn structure_and_hecke_apply() {
    let out = run(&["structure", "--r", "12,14"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rows"][0]["dim_vr_mod_vstar"], 10);
    let out = run(&["hecke-apply", "--p", "3", "--f", "2", "--N", "3", "--r", "2,1", "--j", "1,0", "--rep", "plus:4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["summary"]["oracle_agrees"], true);
    assert_eq!(v["summary"]["entries"], 10);
}
