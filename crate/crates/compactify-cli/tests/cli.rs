//! End-to-end tests of the binary: exit codes, file round-trips, and
//! byte-determinism of reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_compactify"))
}

fn write_temp(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("compactify-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn verify_exit_codes_follow_the_contract() {
    let dir = temp_dir("codes");
    let good = write_temp(&dir, "good.json", r#"{"size":4,"map":[0,0,0,1]}"#);
    let swap = write_temp(&dir, "swap.json", r#"{"size":2,"map":[1,0]}"#);
    let bad = write_temp(&dir, "bad.json", "{oops");

    assert_eq!(run(&["verify", good.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(run(&["verify", swap.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["verify", bad.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(
        run(&["verify", dir.join("missing.json").to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn check_reports_the_eventual_image() {
    let dir = temp_dir("check");
    let swap = write_temp(&dir, "swap.json", r#"{"size":2,"map":[1,0]}"#);
    let output = run(&["check", swap.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["holds"], serde_json::json!(false));
    assert_eq!(report["eventual_image"], serde_json::json!([0, 1]));
}

#[test]
fn pipeline_report_counts_classes() {
    let dir = temp_dir("classes");
    let inst = write_temp(&dir, "inst.json", r#"{"size":4,"map":[0,0,0,1]}"#);
    let output = run(&["verify", inst.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["outcome"], serde_json::json!("verified"));
    assert_eq!(report["class_count"], serde_json::json!(2));
}

#[test]
fn gen_then_verify_round_trip() {
    let dir = temp_dir("gen");
    let inst = dir.join("gen.json");
    for shape in ["uniform", "deep-chain", "wide-fan"] {
        let status = bin()
            .args([
                "gen",
                "--size",
                "60",
                "--seed",
                "11",
                "--shape",
                shape,
                "--out",
                inst.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        assert_eq!(run(&["verify", inst.to_str().unwrap()]).status.code(), Some(0));
    }
}

#[test]
fn gen_is_deterministic() {
    let a = run(&["gen", "--size", "50", "--seed", "9", "--shape", "uniform"]);
    let b = run(&["gen", "--size", "50", "--seed", "9", "--shape", "uniform"]);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn compactified_witness_verifies_from_file() {
    let dir = temp_dir("witness");
    let inst = write_temp(&dir, "inst.json", r#"{"size":6,"map":[0,0,1,1,1,2]}"#);
    let witness = dir.join("witness.json");
    let status = bin()
        .args([
            "compactify",
            inst.to_str().unwrap(),
            "--out",
            witness.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(
        run(&[
            "verify",
            inst.to_str().unwrap(),
            "--witness",
            witness.to_str().unwrap(),
        ])
        .status
        .code(),
        Some(0)
    );
}

#[test]
fn tampered_witness_file_fails_verification() {
    let dir = temp_dir("tamper");
    let inst = write_temp(&dir, "inst.json", r#"{"size":4,"map":[0,0,0,1]}"#);
    let witness_path = dir.join("witness.json");
    bin()
        .args([
            "compactify",
            inst.to_str().unwrap(),
            "--out",
            witness_path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    let mut witness: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&witness_path).unwrap()).unwrap();
    witness["star"] = serde_json::json!(1);
    fs::write(&witness_path, serde_json::to_string(&witness).unwrap()).unwrap();
    let output = run(&[
        "verify",
        inst.to_str().unwrap(),
        "--witness",
        witness_path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["passed"], serde_json::json!(false));
}

#[test]
fn ray_instances_run_through_the_pipeline() {
    let dir = temp_dir("ray");
    let inst = write_temp(
        &dir,
        "ray.json",
        r#"{"ray":{"prefix":2,"branches":[{"nodes":[],"parent":{}},{"nodes":[5],"parent":{"5":1}}]}}"#,
    );
    let output = run(&["verify", inst.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["branch_count"], serde_json::json!(2));
}

#[test]
fn shuffled_orders_verify_and_differ_from_canonical() {
    let dir = temp_dir("shuffle");
    let inst = write_temp(&dir, "inst.json", r#"{"size":9,"map":[0,0,1,1,1,2,2,3,3]}"#);
    let canonical = run(&["compactify", inst.to_str().unwrap()]);
    let shuffled = run(&["compactify", inst.to_str().unwrap(), "--shuffle-orders", "5"]);
    assert_eq!(canonical.status.code(), Some(0));
    assert_eq!(shuffled.status.code(), Some(0));
    assert_eq!(
        run(&["verify", inst.to_str().unwrap(), "--shuffle-orders", "5"])
            .status
            .code(),
        Some(0)
    );

    let same_seed = run(&["compactify", inst.to_str().unwrap(), "--shuffle-orders", "5"]);
    assert_eq!(shuffled.stdout, same_seed.stdout);
}

#[test]
fn reports_are_byte_deterministic() {
    let dir = temp_dir("determinism");
    let inst = write_temp(&dir, "inst.json", r#"{"size":6,"map":[0,0,1,1,1,2]}"#);
    for args in [
        vec!["verify"],
        vec!["decompose"],
        vec!["atomize"],
        vec!["compactify"],
        vec!["export-dot"],
        vec!["export-dot", "--witness"],
    ] {
        let mut full = args.clone();
        full.insert(1, inst.to_str().unwrap());
        let a = bin().args(&full).output().unwrap();
        let b = bin().args(&full).output().unwrap();
        assert!(!a.stdout.is_empty(), "{args:?} produced no output");
        assert_eq!(a.stdout, b.stdout, "{args:?} not deterministic");
    }
}

#[test]
fn export_dot_emits_the_functional_graph() {
    let dir = temp_dir("dot");
    let inst = write_temp(&dir, "inst.json", r#"{"size":4,"map":[0,0,0,1]}"#);
    let output = run(&["export-dot", inst.to_str().unwrap()]);
    let text = String::from_utf8(output.stdout).unwrap();
    for edge in ["p0 -> p0;", "p1 -> p0;", "p2 -> p0;", "p3 -> p1;"] {
        assert!(text.contains(edge), "missing {edge}");
    }
}
