use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbox-forge"))
        .args(args)
        .env_remove("SBOX_FORGE_THREADS")
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn keys(v: &Value) -> Vec<&str> {
    v.as_object().unwrap().keys().map(String::as_str).collect()
}

fn assert_report_schema(v: &Value, extra: &[&str]) {
    let mut expect = vec!["input", "metrics", "poly", "version"];
    expect.extend_from_slice(extra);
    expect.sort_unstable();
    assert_eq!(keys(v), expect);
    if !v["metrics"].is_null() {
        assert_eq!(
            keys(&v["metrics"]),
            vec!["bijective", "degree", "du", "fixed_points", "image_size", "nl"]
        );
    }
    if !v["input"].is_null() {
        assert_eq!(keys(&v["input"]), vec!["sha256", "source"]);
        assert_eq!(v["input"]["sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn construct_round_trips_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    for (strategy, name) in [("greedy", "g.sbox"), ("anneal", "a.bin")] {
        let path = dir.path().join(name);
        let c = json(&[
            "construct", "--alpha", "0x32", "--beta", "0x59", "--strategy", strategy, "--out",
            path.to_str().unwrap(), "--json",
        ]);
        assert_report_schema(&c, &["outcome"]);
        assert_eq!(c["outcome"]["reassignments"].as_array().unwrap().len(), 64);
        assert_eq!(c["outcome"]["base_image_size"], 192);
        let a = json(&["analyze", path.to_str().unwrap(), "--json"]);
        assert_report_schema(&a, &[]);
        assert_eq!(a["metrics"], c["metrics"]);
        assert_eq!(a["metrics"]["bijective"], true);
        let (du, nl) = (a["metrics"]["du"].as_u64().unwrap(), a["metrics"]["nl"].as_u64().unwrap());
        assert!(du >= 2 && nl <= 112);
    }
    assert_eq!(std::fs::metadata(dir.path().join("a.bin")).unwrap().len(), 256);
}

#[test]
fn analyze_known_files() {
    let v = json(&["analyze", data("identity8.sbox").to_str().unwrap(), "--json"]);
    let m = &v["metrics"];
    assert_eq!((m["du"].as_u64(), m["nl"].as_u64(), m["bijective"].as_bool()), (Some(256), Some(0), Some(true)));
    assert_eq!(m["fixed_points"], 256);

    let v = json(&["analyze", data("rijndael.sbox").to_str().unwrap(), "--ddt", "--walsh", "--json"]);
    assert_report_schema(&v, &["tables"]);
    let ddt = v["tables"]["ddt"].as_array().unwrap();
    assert_eq!(ddt.len(), 256);
    assert_eq!(ddt[0][0], 256);
    let walsh = v["tables"]["walsh"].as_array().unwrap();
    assert_eq!(walsh[0][0], 256);

    let text = String::from_utf8(run(&["analyze", data("rijndael.sbox").to_str().unwrap()]).stdout).unwrap();
    assert!(text.contains("du            4") && text.contains("nl            112"), "{text}");
}

#[test]
fn malformed_files_exit_2_naming_the_token() {
    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("short.sbox");
    std::fs::write(&short, vec!["00"; 255].join(" ")).unwrap();
    let out = run(&["analyze", short.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("255"));

    let bad = dir.path().join("bad.sbox");
    std::fs::write(&bad, "0 1 2 3 4 5 g6 7").unwrap();
    let out = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("token 6"));

    let out = run(&["analyze", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binary_and_text_inputs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("rijndael.sbox")).unwrap();
    let bytes: Vec<u8> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(str::split_whitespace)
        .map(|t| u8::from_str_radix(t, 16).unwrap())
        .collect();
    let raw = dir.path().join("aes.raw");
    std::fs::write(&raw, &bytes).unwrap();
    let a = json(&["analyze", raw.to_str().unwrap(), "--json"]);
    let b = json(&["analyze", data("rijndael.sbox").to_str().unwrap(), "--json"]);
    assert_eq!(a["metrics"], b["metrics"]);
    let forced = run(&["analyze", data("rijndael.sbox").to_str().unwrap(), "--format", "binary"]);
    assert_eq!(forced.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["construct", "--alpha", "0", "--beta", "1"],
        vec!["construct", "--alpha", "0x100", "--beta", "1"],
        vec!["construct", "--alpha", "1", "--beta", "1", "--i", "8"],
        vec!["construct", "--alpha", "1", "--beta", "1", "--poly", "0x100"],
        vec!["construct", "--alpha", "1", "--beta", "1", "--strategy", "tabu"],
        vec!["survey", "2"],
        vec!["survey", "13"],
        vec!["survey", "8", "--poly", "0x13"],
        vec!["count", "0"],
        vec!["search", "--n", "4", "--target", "8"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["construct", "--alpha", "0", "--beta", "1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha = 0"));
    let out = Command::new(env!("CARGO_BIN_EXE_sbox-forge"))
        .args(["count", "3"])
        .env("SBOX_FORGE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn count_rows() {
    let v = json(&["count", "2", "--json"]);
    assert_report_schema(&v, &["count"]);
    assert!(v["poly"].is_null());
    assert_eq!((v["count"]["mu"].as_str(), v["count"]["n_mu"].as_str()), (Some("0"), Some("0")));
    let v = json(&["count", "8", "--json"]);
    assert_eq!(v["count"]["approx"]["bt"], "3.23e616");
    assert_eq!(v["count"]["bp"].as_str().unwrap().len(), 507);
}

#[test]
fn small_survey_and_search() {
    let v = json(&["survey", "3", "--json"]);
    assert_report_schema(&v, &["survey"]);
    assert_eq!(v["survey"]["exponents"], 6);

    let dir = tempfile::tempdir().unwrap();
    let best = dir.path().join("best.sbox");
    let v = json(&["search", "--n", "4", "--top", "5", "--out", best.to_str().unwrap(), "--json"]);
    assert_report_schema(&v, &["outcome", "search"]);
    let s = &v["search"];
    assert_eq!(s["top"].as_array().unwrap().len(), 5);
    assert_eq!(s["candidates"], 15 * 16);
    assert_eq!(v["metrics"]["bijective"], true);
    let a = json(&["analyze", best.to_str().unwrap(), "--json"]);
    assert_eq!(a["metrics"], v["metrics"]);
    for e in s["top"].as_array().unwrap() {
        assert_eq!((e["du"].clone(), e["nl"].clone()), (s["best"]["du"].clone(), s["best"]["nl"].clone()));
    }
}
