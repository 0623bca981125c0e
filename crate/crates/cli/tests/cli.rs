use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn fixture(name: &str) -> String {
    corpus_dir().join("fixtures").join(name).display().to_string()
}

fn tcclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcclab"))
        .args(args)
        .env_remove("TCCLAB_SCHEME_MANIFEST")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn result(o: &Output) -> Value {
    let v: Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stderr(o)));
    v["result"].clone()
}

#[test]
fn parse_prints_canonical_form() {
    let o = tcclab(&["parse", &fixture("2b.sbt")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = result(&o);
    assert_eq!(r["canonical"], "[_α λ [_α ∅ [_β ∅ [_V ∅ [_δ ∅ ε]]]]]");
    assert_eq!(r["nodes"], 5);
}

#[test]
fn parse_errors_exit_2() {
    assert_eq!(code(&tcclab(&["parse", "missing.sbt"])), 2);
    let o = tcclab(&["parse", &fixture("ternary.sbt")]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("exactly two daughters"), "{err}");
    assert!(err.contains("ternary.sbt:2:"), "{err}");
}

#[test]
fn complexity_of_literal() {
    let o = tcclab(&["complexity", "--seq", "0001101001000101"]);
    assert_eq!(code(&o), 0);
    let r = result(&o);
    assert_eq!(r["complexity"]["phrase_count"], 6);
    assert_eq!(r["complexity"]["length"], 16);
    assert_eq!(r["complexity"]["display"], "1.50");
    assert_eq!(code(&tcclab(&["complexity", "--seq", "0"])), 3);
}

#[test]
fn complexity_of_structure() {
    let o = tcclab(&["complexity", &fixture("2b.sbt"), "--scheme", "labels+terminals"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = result(&o);
    assert_eq!(r["sequence"]["tokens"], serde_json::json!(["α", "λ", "α", "β", "V", "δ", "ε"]));
    let o = tcclab(&["complexity", &fixture("14b.sbt"), "--scheme", "path-steps"]);
    assert_eq!(result(&o)["complexity"]["display"], "1.58");
    let o = tcclab(&["complexity", &fixture("6b.sbt"), "--scheme", "path-steps", "--goal", "path:RLRR"]);
    assert_eq!(result(&o)["complexity"]["display"], "2.00");
    assert_eq!(code(&tcclab(&["complexity", &fixture("2b.sbt"), "--scheme", "nope"])), 2);
}

#[test]
fn compare_prefers_shorter_search() {
    let o = tcclab(&["compare", &fixture("14a.sbt"), &fixture("14b.sbt"), "--scheme", "path-steps"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = result(&o);
    assert_eq!(r["preferred"], serde_json::json!(["b"]));
    assert!(r["preferred_files"][0].as_str().unwrap().ends_with("14b.sbt"));
    assert_eq!(r["tie"], false);
}

#[test]
fn compare_labeling_pair() {
    let o = tcclab(&["compare", &fixture("15a.sbt"), &fixture("15b.sbt"), "--scheme", "phrase-labels"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(result(&o)["preferred"], serde_json::json!(["b"]));
}

#[test]
fn compare_identical_is_tie() {
    let f = fixture("2b.sbt");
    let o = tcclab(&["compare", &f, &f]);
    assert_eq!(code(&o), 0);
    let r = result(&o);
    assert_eq!(r["tie"], true);
    assert_eq!(r["preferred"], serde_json::json!(["a", "b"]));
}

#[test]
fn compare_scheme_mismatch_exit_3() {
    let o = tcclab(&["compare", &fixture("14a.sbt"), &fixture("14b.sbt"), "--scheme", "path-steps", "--scheme-b", "path-edges"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn shipped_corpus_all_correct() {
    let dir = corpus_dir().display().to_string();
    let o = tcclab(&["corpus", &dir]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = result(&o);
    assert_eq!(r["correct"], 4);
    assert_eq!(r["total"], 4);
    let t = tcclab(&["corpus", &dir, "--format", "table"]);
    let text = String::from_utf8(t.stdout).unwrap();
    assert!(text.starts_with("pair "));
    assert!(text.contains("4/4 orderings correct"));
    let c = tcclab(&["corpus", &dir, "--format", "csv"]);
    let csv = String::from_utf8(c.stdout).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().all(|l| l.split(',').count() == 7));
}

fn copy_corpus(to: &Path) {
    fs::create_dir_all(to.join("fixtures")).unwrap();
    for e in fs::read_dir(corpus_dir().join("fixtures")).unwrap() {
        let e = e.unwrap();
        fs::copy(e.path(), to.join("fixtures").join(e.file_name())).unwrap();
    }
    fs::copy(corpus_dir().join("manifest.json"), to.join("manifest.json")).unwrap();
}

#[test]
fn inverted_gold_fails_with_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    copy_corpus(tmp.path());
    let manifest = fs::read_to_string(tmp.path().join("manifest.json")).unwrap();
    let flipped = manifest
        .replace(r#""fixtures/14a.sbt", "gold": "ungrammatical""#, r#""fixtures/14a.sbt", "gold": "GRAM""#)
        .replace(r#""fixtures/14b.sbt", "gold": "grammatical""#, r#""fixtures/14b.sbt", "gold": "ungrammatical""#)
        .replace(r#""gold": "GRAM""#, r#""gold": "grammatical""#);
    assert_ne!(flipped, manifest);
    fs::write(tmp.path().join("manifest.json"), flipped).unwrap();
    let o = tcclab(&["corpus", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("pair 14"), "{}", stderr(&o));
    let r = result(&o);
    let bad: Vec<&Value> = r["pairs"].as_array().unwrap().iter().filter(|p| p["correct"] == false).collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0]["pair"], "14");
}

#[test]
fn corpus_input_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&tcclab(&["corpus", tmp.path().to_str().unwrap()])), 2);
    fs::write(tmp.path().join("manifest.json"), r#"{"pairs":[{"id":"x","scheme":"path-steps","members":[{"file":"gone.sbt","gold":"grammatical"},{"file":"b.sbt","gold":"ungrammatical"}]}]}"#).unwrap();
    let o = tcclab(&["corpus", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("gone.sbt"));
}

#[test]
fn derive_counts_and_errors() {
    let o = tcclab(&["derive", "--steps", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = result(&o);
    assert_eq!(r["total_distinct_sets"], 1);
    assert!(r.get("wall_time_ms").is_none());
    assert_eq!(code(&tcclab(&["derive", "--steps", "0"])), 2);

    let tmp = tempfile::tempdir().unwrap();
    let lex = tmp.path().join("ab.json");
    fs::write(&lex, r#"["a", "b"]"#).unwrap();
    let o = tcclab(&["derive", "--lexicon", lex.to_str().unwrap(), "--steps", "3"]);
    assert_eq!(result(&o)["total_distinct_sets"], 9);
    let o = tcclab(&["derive", "--lexicon", lex.to_str().unwrap(), "--steps", "3", "--constraints", "ntc,extension,rr"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(result(&o)["total_distinct_sets"].as_u64().unwrap() <= 9);

    fs::write(&lex, r#"["[a b]"]"#).unwrap();
    assert_eq!(code(&tcclab(&["derive", "--lexicon", lex.to_str().unwrap(), "--steps", "1"])), 2);
}

#[test]
fn derive_budget_exit_4() {
    let o = tcclab(&["derive", "--steps", "6", "--mem-budget", "1K"]);
    assert_eq!(code(&o), 4);
    let r = result(&o);
    assert_eq!(r["authoritative"], false);
    assert!(stderr(&o).contains("partial"));
}

#[test]
fn derive_timing_is_opt_in() {
    let o = tcclab(&["derive", "--steps", "2", "--timing"]);
    assert!(result(&o).get("wall_time_ms").is_some());
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn fep_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let eq = write(tmp.path(), "eq.json", r#"{"q":[0.3,0.7],"p":[0.3,0.7]}"#);
    let o = tcclab(&["fep", "kl", "--model", &eq]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(result(&o)["kl"].as_f64().unwrap(), 0.0);

    let m = write(tmp.path(), "m.json", r#"{"prior":[0.7,0.3],"likelihood":[[0.9,0.1],[0.2,0.8]],"q":[0.5,0.5],"outcome":0}"#);
    let r = result(&tcclab(&["fep", "vfe", "--model", &m]));
    assert!(r["max_residual"].as_f64().unwrap() <= 1e-9);
    assert!((r["F"].as_f64().unwrap() - 0.944575907618).abs() < 1e-9);
    assert_eq!(r["bound_holds"], true);

    let pol = write(
        tmp.path(),
        "pol.json",
        r#"{"policy":[{"state_prior":[0.5,0.5],"likelihood":[[0.9,0.1],[0.1,0.9]],"outcome_prior":[0.8,0.2]},
                      {"state_prior":[0.2,0.8],"likelihood":[[0.5,0.5],[0.5,0.5]],"outcome_prior":[0.5,0.5]}]}"#,
    );
    let r = result(&tcclab(&["fep", "efe", "--model", &pol]));
    assert!(r["max_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(r["steps"][1]["epistemic"].as_f64().unwrap(), 0.0);
    let g = r["G"].as_f64().unwrap();
    let sum: f64 = r["steps"].as_array().unwrap().iter().map(|s| s["G"].as_f64().unwrap()).sum();
    assert!((g - sum).abs() < 1e-9);
}

#[test]
fn fep_error_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.json", r#"{"q":[0.5,0.5]}"#);
    assert_eq!(code(&tcclab(&["fep", "kl", "--model", &bad])), 2);
    let unnorm = write(tmp.path(), "u.json", r#"{"q":[0.5,0.6],"p":[0.5,0.5]}"#);
    assert_eq!(code(&tcclab(&["fep", "kl", "--model", &unnorm])), 2);
    let ac = write(tmp.path(), "ac.json", r#"{"q":[0.5,0.5],"p":[1.0,0.0]}"#);
    assert_eq!(code(&tcclab(&["fep", "kl", "--model", &ac])), 3);
}

#[test]
fn output_is_byte_stable() {
    let dir = corpus_dir().display().to_string();
    for args in [
        vec!["corpus", dir.as_str()],
        vec!["derive", "--steps", "4"],
        vec!["calibrate", dir.as_str()],
    ] {
        let a = tcclab(&args);
        let b = tcclab(&args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn report_envelope() {
    let o = tcclab(&["complexity", "--seq", "0101"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tool"], "tcclab");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["command"], serde_json::json!(["complexity", "--seq", "0101"]));
    assert_eq!(v["scheme_manifest_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn scheme_manifest_override() {
    let shipped = corpus_dir().join("schemes.json");
    let default = tcclab(&["schemes"]);
    assert_eq!(default.stdout, fs::read(&shipped).unwrap());

    let tmp = tempfile::tempdir().unwrap();
    let only = write(
        tmp.path(),
        "s.json",
        r#"{"schemes":[{"id":"steps","node_classes":["steps"],"symbol_map":"fresh-per-step","boundary_markers":false}]}"#,
    );
    let run = |args: &[&str], manifest: &str| {
        Command::new(env!("CARGO_BIN_EXE_tcclab")).args(args).env("TCCLAB_SCHEME_MANIFEST", manifest).output().unwrap()
    };
    let o = run(&["complexity", &fixture("14a.sbt"), "--scheme", "steps"], &only);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(result(&o)["complexity"]["display"], "2.00");
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let d: Value = serde_json::from_slice(&tcclab(&["complexity", "--seq", "01"]).stdout).unwrap();
    assert_ne!(v["scheme_manifest_sha256"], d["scheme_manifest_sha256"]);
    assert_eq!(code(&run(&["schemes"], "/nonexistent/s.json")), 2);
}
