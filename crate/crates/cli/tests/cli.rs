use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hyparr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyparr"))
        .args(args)
        .env_remove("HYPARR_SEED")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn builtin_file(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let mut args = vec!["builtin", name];
    args.extend_from_slice(extra);
    let out = hyparr(&args);
    assert!(out.status.success(), "builtin {name} failed");
    let path = dir.path().join(format!("{name}.json"));
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn obstruct_generic4() {
    let dir = TempDir::new().unwrap();
    let f = builtin_file(&dir, "generic4", &[]);
    let out = hyparr(&["obstruct", p(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["command"], "obstruct");
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
    let payload = &r["payload"];
    assert_eq!(payload["minimal_k"], 2);
    assert_eq!(payload["kpi1_possible"], false);
    assert_eq!(payload["gaps"][0]["eps"], "+++-");
    assert_eq!(payload["gaps"][0]["flat"], serde_json::json!([1, 2, 3, 4]));
    assert_eq!(payload["homotopy"][0], "pi_2 != 0");
    assert_eq!(r["certificates"][0]["type"], "dual");
    assert_eq!(r["certificates"][0]["verified"], true);
}

#[test]
fn sigma_cx2() {
    let dir = TempDir::new().unwrap();
    let f = builtin_file(&dir, "cx2", &[]);
    let out = hyparr(&["sigma", p(&f)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["payload"]["counts"], serde_json::json!([128, 34, 34]));

    let out = hyparr(&["sigma", p(&f), "--k", "3"]);
    assert_eq!(json_of(&out)["payload"]["members"].as_array().unwrap().len(), 34);
}

#[test]
fn validate_rejects_rank_deficient() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, r#"{"dim":3,"forms":[["1","0","0"],["0","1","0"],["1","1","0"]]}"#).unwrap();
    let out = hyparr(&["validate", p(&f)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["error"], "NotEssential");
}

#[test]
fn domain_and_usage_errors() {
    let dir = TempDir::new().unwrap();
    let f = builtin_file(&dir, "generic4", &[]);
    let out = hyparr(&["certify", p(&f), "--eps", "++++"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["error"], "GloballyConsistent");
    let out = hyparr(&["certify", p(&f), "--eps", "++"]);
    assert_eq!(out.status.code(), Some(1));
    let out = hyparr(&["obstruct", p(&f), "--limit", "3", "--samples", "0"]);
    assert_eq!(json_of(&out)["error"], "TooLarge");
    let out = hyparr(&["validate", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(hyparr(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hyparr(&["sink", p(&f)]).status.code(), Some(2));
}

#[test]
fn output_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let f = builtin_file(&dir, "generic4", &[]);
    for args in [
        vec!["obstruct", p(&f)],
        vec!["chambers", p(&f)],
        vec!["sphere", p(&f), "--eps", "+++-", "--count", "20"],
    ] {
        let a = hyparr(&args).stdout;
        let mut with_jobs = args.clone();
        with_jobs.extend(["--jobs", "1"]);
        let b = hyparr(&with_jobs).stdout;
        assert_eq!(a, b, "{args:?}");
    }
    let a = hyparr(&["builtin", "generic", "--n", "6", "--l", "3", "--seed", "11"]).stdout;
    let b = hyparr(&["builtin", "generic", "--n", "6", "--l", "3", "--seed", "11"]).stdout;
    assert_eq!(a, b);
}

#[test]
fn certify_sink_and_sphere() {
    let dir = TempDir::new().unwrap();
    let f = builtin_file(&dir, "generic4", &[]);
    let r = json_of(&hyparr(&["certify", p(&f), "--eps", "+++-"]));
    assert_eq!(r["payload"]["rotation"], "1/4");
    assert_eq!(r["payload"]["separating"], serde_json::json!([4]));
    assert_eq!(r["payload"]["sink"]["signs"], "++++");
    assert_eq!(r["payload"]["verified"], true);

    let r = json_of(&hyparr(&["certify", p(&f), "--eps", "+++-", "--weights", "1/2,1/2,1/2,1/2"]));
    assert_eq!(r["payload"]["rotation"], "1/2");
    let out = hyparr(&["certify", p(&f), "--eps", "+++-", "--weights", "0,0,0,1"]);
    assert_eq!(json_of(&out)["error"], "WeightConditionViolated");

    let r = json_of(&hyparr(&["sink", p(&f), "--eps", "+++-", "--start", "----"]));
    assert_eq!(r["payload"]["path"], serde_json::json!(["----", "+---", "++--"]));
    assert_eq!(r["payload"]["is_sink"], true);

    let r = json_of(&hyparr(&["sphere", p(&f), "--eps", "+++-", "--count", "30"]));
    assert_eq!(r["payload"]["verified"], 30);
}

#[test]
fn lattice_chambers_and_cone() {
    let dir = TempDir::new().unwrap();
    let f = builtin_file(&dir, "braid", &["--n", "4"]);
    let r = json_of(&hyparr(&["lattice", p(&f)]));
    assert_eq!(r["payload"]["chamber_count"], 24);
    let r = json_of(&hyparr(&["chambers", p(&f)]));
    assert_eq!(r["payload"]["count"], 24);
    assert_eq!(r["certificates"].as_array().unwrap().len(), 24);

    let x2 = builtin_file(&dir, "x2", &[]);
    let coned = hyparr(&["cone", p(&x2)]);
    assert!(coned.status.success());
    assert_eq!(coned.stdout, hyparr(&["builtin", "cx2"]).stdout);
}

#[test]
fn seed_from_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_hyparr"))
            .args(["builtin", "generic", "--n", "5", "--l", "3"])
            .env("HYPARR_SEED", seed)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("4"), hyparr(&["builtin", "generic", "--n", "5", "--l", "3", "--seed", "4"]).stdout);
    assert_ne!(run("4"), run("5"));
}
