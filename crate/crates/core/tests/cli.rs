use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use mtt_core::mtt::MTTDatum;

fn lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtt-lab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

#[test]
fn demo_then_validate_and_compute() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["demo", "single-degree", "--d", "2", "--m0", "-1", "-o", "sd.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let back = MTTDatum::load(dir.path().join("sd.json")).unwrap();
    assert_eq!(back.interaction_polynomial(0, 1).unwrap().to_string(), "2*q^-1");

    let out = lab(&["validate", "sd.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));

    let out = lab(&["compute", "sd.json", "--channel", "1", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out.stdout);
    assert!(v.to_string().contains("2*q^-1"), "{v}");

    let out = lab(&["compute", "sd.json", "--all", "--format", "csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5, "{text}");
}

#[test]
fn every_demo_validates() {
    let dir = tempfile::tempdir().unwrap();
    for name in mtt_core::models::DEMO_NAMES {
        let file = format!("{name}.json");
        let out = lab(&["demo", name, "-o", &file], dir.path());
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let out = lab(&["validate", &file], dir.path());
        assert_eq!(out.status.code(), Some(0), "{name}");
    }
    assert!(dir.path().join("obstruction.alt.json").exists());
}

#[test]
fn verify_on_a_file() {
    let dir = tempfile::tempdir().unwrap();
    lab(&["demo", "bridge", "-o", "b.json"], dir.path());
    let out = lab(&["verify", "b.json", "--suite", "all", "--trials", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out.stdout)["all_passed"], Value::Bool(true));
}

#[test]
fn report_formats() {
    let dir = tempfile::tempdir().unwrap();
    lab(&["demo", "directedness", "-o", "d.json"], dir.path());
    let out = lab(&["report", "d.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let md = String::from_utf8(out.stdout).unwrap();
    assert!(md.contains("## Channels"), "{md}");
    let out = lab(&["report", "d.json", "--against", "d.json", "--format", "json"], dir.path());
    assert_eq!(json(&out.stdout)["comparison"], Value::Array(vec![]));
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"nodes": ["a"]}"#).unwrap();
    for args in [
        vec!["validate", "bad.json"],
        vec!["validate", "missing.json"],
        vec!["demo", "no-such-demo"],
        vec!["verify", "--random", "--suite", "nope"],
    ] {
        let out = lab(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        let summary = json(&out.stderr);
        assert_eq!(summary["status"], "invalid", "{args:?}");
        assert!(!summary["diagnostics"].as_array().unwrap().is_empty());
    }
}

#[test]
fn out_of_range_channel_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    lab(&["demo", "bridge", "-o", "b.json"], dir.path());
    let out = lab(&["compute", "b.json", "--channel", "9", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
