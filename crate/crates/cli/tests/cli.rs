use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gstats(atlas: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gstats"))
        .env("ATLAS_DIR", atlas)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn atlas_dir(orders: &[usize]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for n in orders {
        let out = gstats(dir.path(), &["enumerate", "--n", &n.to_string()]);
        assert!(out.status.success());
    }
    dir
}

#[test]
fn enumerate_reports_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = gstats(dir.path(), &["enumerate", "--n", "4", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["n"], 4);
    assert_eq!(v["count"], 11);
    assert!(dir.path().join("n4.g6").exists());
}

#[test]
fn flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let out = gstats(
        env_dir.path(),
        &["--atlas-dir", flag_dir.path().to_str().unwrap(), "enumerate", "--n", "3"],
    );
    assert!(out.status.success());
    assert!(flag_dir.path().join("n3.csv").exists());
    assert!(!env_dir.path().join("n3.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(gstats(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(gstats(dir.path(), &["enumerate", "--bogus"]).status.code(), Some(2));
    let missing = gstats(dir.path(), &["find", "--n", "7", "--vary", "r", "--json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(json(&missing)["error"]["code"], "MissingAtlas");
    let bad = gstats(dir.path(), &["find", "--n", "5", "--vary", "r", "--fix", "gcc:0.9:0.1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(gstats(dir.path(), &["find", "--n", "5", "--vary", "wiener"]).status.code(), Some(2));
}

#[test]
fn stats_rejects_single_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.g6");
    let output = dir.path().join("out.csv");
    std::fs::write(&input, "@\n").unwrap();
    let out = gstats(
        dir.path(),
        &["stats", "--in", input.to_str().unwrap(), "--out", output.to_str().unwrap(), "--json"],
    );
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["rows"], 0);
    assert_eq!(v["rejected"][0]["code"], "OrderTooSmall");
    let csv = std::fs::read_to_string(&output).unwrap();
    assert_eq!(csv.lines().count(), 1, "header only");
}

#[test]
fn generate_is_idempotent() {
    let dir = atlas_dir(&[5, 6]);
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = gstats(
            dir.path(),
            &[
                "generate", "--model", "er", "--edge-strategy", "population", "--n", "6", "--rate", "0.5",
                "--seed", "9", "--out", out_dir.to_str().unwrap(), "--workers", if sub == "a" { "1" } else { "3" },
            ],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (
            std::fs::read(out_dir.join("sample.g6")).unwrap(),
            std::fs::read(out_dir.join("sample.csv")).unwrap(),
        )
    };
    let (g6a, csva) = run("a");
    let (g6b, csvb) = run("b");
    assert_eq!(g6a, g6b);
    assert_eq!(csva, csvb);
    assert_eq!(g6a.iter().filter(|&&b| b == b'\n').count(), 78);

    let sample = dir.path().join("a");
    let out = gstats(dir.path(), &["correlate", "--source", "sample", "--n", "6", "--sample", sample.to_str().unwrap(), "--json"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["sample_size"], 78);

    let out = gstats(dir.path(), &["generate", "--model", "ba", "--edge-strategy", "uniform", "--n", "6", "--out", "x"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analysis_commands_emit_json() {
    let dir = atlas_dir(&[5, 6, 7]);
    let out = gstats(dir.path(), &["correlate", "--n", "7", "--json"]);
    let m = json(&out);
    assert_eq!(m["sample_size"], 1044);
    assert_eq!(m["values"].as_array().unwrap().len(), 10);

    let out = gstats(dir.path(), &["coverage", "--n", "7", "--model", "gnm-uniform", "--rate", "0.1", "--runs", "3", "--json"]);
    let c = json(&out);
    assert_eq!(c["report"]["runs"], 3);
    let ratio = c["report"]["volume_ratio"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&ratio));

    let out = gstats(dir.path(), &["compare", "--n", "7", "--model", "er-half", "--metric", "kl", "--stat", "den", "--json"]);
    let k = json(&out);
    assert_eq!(k["metric"]["bins"], 20);
    assert!(k["distances"][0]["value"].as_f64().unwrap() >= 0.0);

    let out = gstats(dir.path(), &["trends", "--n-min", "5", "--n-max", "7", "--count-per-n", "200", "--json"]);
    let t = json(&out);
    assert_eq!(t.as_array().unwrap().len(), 45);
    assert_eq!(t[0]["truth"].as_array().unwrap().len(), 3);
}

#[test]
fn find_writes_slot_files() {
    let dir = atlas_dir(&[5]);
    let slots = dir.path().join("slots");
    let out = gstats(
        dir.path(),
        &["find", "--n", "5", "--vary", "ce", "--fix", "girth:3", "--out", slots.to_str().unwrap(), "--json"],
    );
    assert!(out.status.success());
    let v = json(&out);
    let total: u64 = v["slots"].as_array().unwrap().iter().map(|s| s["count"].as_u64().unwrap()).sum();
    assert_eq!(total, v["total_matches"].as_u64().unwrap());
    let mut written = 0;
    for entry in std::fs::read_dir(&slots).unwrap() {
        written += std::fs::read_to_string(entry.unwrap().path()).unwrap().lines().count();
    }
    assert_eq!(written as u64, total);

    let out = gstats(dir.path(), &["find", "--preset", "assortativity-variability", "--n", "5", "--json"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["vary"], "r");
}
