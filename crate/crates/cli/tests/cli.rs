use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lcr(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcr"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn split_prints_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.py"), "def f():\n    if x:\n        return 1\n").unwrap();
    let out = lcr(dir.path(), &["split", "--strategy", "ast", "f.py"]);
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let texts: Vec<&str> = lines.iter().map(|l| l["text"].as_str().unwrap()).collect();
    assert_eq!(texts, ["def f():", "if x:", "return 1"]);
    assert_eq!(lines[1]["start"], 13);
    assert_eq!(lines[1]["end"], 18);
}

#[test]
fn mismatched_search_config_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert!(lcr(dir.path(), &["gen-synthetic", "--n", "20", "--out", "c.jsonl"]).status.success());
    assert!(lcr(dir.path(), &["index", "--corpus", "c.jsonl", "--out", "i.bin"]).status.success());
    let ok = lcr(dir.path(), &["search", "--index", "i.bin", "--query", "read file", "--top-k", "50"]);
    assert!(ok.status.success());
    assert_eq!(stdout_json(&ok)["hits"].as_array().unwrap().len(), 20);
    let bad = lcr(dir.path(), &["search", "--index", "i.bin", "--query", "read file", "--window", "16", "--step", "8"]);
    assert!(!bad.status.success());
    assert_eq!(stdout_json(&bad)["error"], "FingerprintMismatch");
}

#[test]
fn gen_synthetic_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    lcr(dir.path(), &["gen-synthetic", "--n", "500", "--seed", "7", "--out", "a.jsonl"]);
    lcr(dir.path(), &["gen-synthetic", "--n", "500", "--seed", "7", "--out", "b.jsonl"]);
    let a = fs::read(dir.path().join("a.jsonl")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, fs::read(dir.path().join("b.jsonl")).unwrap());
}

#[test]
fn malformed_lines_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let good = r#"{"id":"a","language":"python","code":"def read_file(p):\n    return open(p)","query":"read file"}"#;
    fs::write(dir.path().join("c.jsonl"), format!("oops\n{good}\n")).unwrap();
    let out = lcr(dir.path(), &["index", "--corpus", "c.jsonl", "--out", "i.bin"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["entries"], 1);
    assert_eq!(report["ingest"]["malformed"][0]["line"], 1);

    fs::write(dir.path().join("bad.jsonl"), "oops\nnope\n").unwrap();
    let out = lcr(dir.path(), &["index", "--corpus", "bad.jsonl", "--out", "i.bin"]);
    assert!(!out.status.success());
    assert_eq!(stdout_json(&out)["error"], "AllLinesMalformed");
}

#[test]
fn usage_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = lcr(dir.path(), &["index", "--corpus", "c.jsonl", "--out", "i.bin", "--fusion", "median"]);
    assert!(!out.status.success());
    let out = lcr(dir.path(), &["eval", "--corpus", "missing.jsonl"]);
    assert_eq!(stdout_json(&out)["error"], "FileNotFound");
}
