use std::path::Path;
use std::process::{Command, Output};

fn mdlab(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_mdlab")).current_dir(dir).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

#[test]
fn corpus_experiment_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    mdlab(d, &["gen-corpus", "--size", "12", "--out", "c"]);
    assert!(d.join("c/manifest.json").is_file());
    mdlab(d, &["assess", "--corpus", "c", "--out", "r", "--jobs", "2"]);
    let records = std::fs::read_to_string(d.join("r/records.jsonl")).unwrap();
    assert_eq!(records.lines().count(), 12 * 2 * 3);
    assert!(d.join("r/work/golden.Foo/B/literalist/original.mjc").is_file());
    mdlab(d, &["report", "--in", "r", "--out", "s.json", "--csv", "s.csv"]);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("s.json")).unwrap()).unwrap();
    assert_eq!(summary["summary"]["classes"], 12);
    assert!(summary["provenance"]["merged"].as_u64().unwrap() > 0);
    assert!(std::fs::read_to_string(d.join("s.csv")).unwrap().starts_with("scope,decompiler"));
}

#[test]
fn single_class_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("a.mj"), "class demo.A {\n    static int twice(int x) {\n        return x * 2;\n    }\n}\n")
        .unwrap();
    mdlab(d, &["compile", "--variant", "A", "--out", "b", "a.mj"]);
    assert!(d.join("b/demo.A.mjc").is_file());
    let out = mdlab(d, &["decompile", "--decompiler", "sugarer", "b/demo.A.mjc"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("static int twice(int "), "{text}");
    std::fs::write(d.join("dec.mj"), &text).unwrap();

    let out = mdlab(d, &["assess", "--decompiler", "literalist", "a.mj"]);
    let rec: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["category"], "StrictlyEquivalent");

    let out = mdlab(d, &["meta", "--order", "optimist,literalist", "--json", "b/demo.A.mjc"]);
    let res: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(res["status"], "success");
    assert_eq!(res["invocations"], serde_json::json!(["optimist"]));

    let out = mdlab(d, &["diff", "a.mj", "dec.mj"]);
    let script: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(script["edits"].is_array());
}

#[test]
fn bad_input_fails_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mdlab"))
        .current_dir(tmp.path())
        .args(["gen-corpus", "--size", "3"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("minimum"));
    let out = Command::new(env!("CARGO_BIN_EXE_mdlab"))
        .current_dir(tmp.path())
        .args(["decompile", "--decompiler", "nope", "x.mjc"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
