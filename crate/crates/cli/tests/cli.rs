use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BCNOT: &str = "1100,0100,0010,0011";

fn distill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distill"))
        .args(args)
        .env_remove("DISTILL_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(&distill(args))).unwrap()
}

fn records(doc: &Value) -> &Vec<Value> {
    doc["records"].as_array().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_perm_bcnot_example() {
    let doc = json(&["run-perm", "--werner", "0.75", "--matrix", BCNOT, "--m", "1"]);
    let rows = records(&doc);
    assert_eq!(rows.len(), 2);
    let t0 = &rows[0];
    assert_eq!(t0["t"], "0");
    assert!((t0["fidelity"].as_f64().unwrap() - 41.0 / 52.0).abs() < 1e-14);
    assert!((t0["prob"].as_f64().unwrap() - 13.0 / 18.0).abs() < 1e-14);
    assert!((t0["paper_fidelity"].as_f64().unwrap() - 41.0 / 26.0).abs() < 1e-14);
    assert_eq!(t0["accepted"], true);
    let t1 = &rows[1];
    assert!((t1["fidelity"].as_f64().unwrap() - 0.25).abs() < 1e-14);
    assert_eq!(t1["accepted"], false);
}

#[test]
fn run_code_agrees_with_run_perm() {
    let code = json(&["run-code", "--werner", "0.75", "--generators", "ZZ"]);
    let perm = json(&["run-perm", "--werner", "0.75", "--matrix", BCNOT, "--m", "1"]);
    for (c, p) in records(&code).iter().zip(records(&perm)) {
        assert_eq!(c["s"], p["t"]);
        assert_eq!(c["prob"], p["prob"]);
        assert_eq!(c["fidelity"], p["fidelity"]);
        assert_eq!(c["output"], p["output"]);
    }
}

#[test]
fn verify_zz_passes() {
    let doc = json(&["verify", "--werner", "0.75", "--generators", "ZZ"]);
    assert_eq!(doc["summary"]["passed"], true);
    assert!(doc["summary"]["max_discrepancy"].as_f64().unwrap() <= 1e-12);
    for r in records(&doc) {
        assert!(r["output_discrepancy"].as_f64().unwrap() <= 1e-12);
        assert_eq!(r["coset_match"], true);
        assert_eq!(r["perm_fidelity"], r["code_fidelity"]);
    }
}

#[test]
fn verify_random_passes() {
    let doc = json(&["verify", "--random", "12", "--seed", "9", "--pairs", "2,3"]);
    assert_eq!(records(&doc).len(), 12);
    assert_eq!(doc["summary"]["failed"], 0);
}

#[test]
fn sweep_improves_every_grid_point() {
    let doc = json(&["sweep"]);
    let rows = records(&doc);
    assert_eq!(rows.len(), 9);
    for r in rows {
        let f = r["fidelity_in"].as_f64().unwrap();
        let out = r["f_out"].as_f64().unwrap();
        let e = (1.0 - f) / 3.0;
        let closed = (f * f + e * e) / (f * f + 2.0 * f * e + 5.0 * e * e);
        assert!(out > f, "{r}");
        assert!((out - closed).abs() < 1e-13, "{r}");
        assert_eq!(r["improved"], true);
    }
}

#[test]
fn json_and_csv_carry_the_same_records() {
    let base = ["run-code", "--pair", "0.7,0.1,0.15,0.05", "--generators", "ZZI,IZZ", "--threshold", "0.5"];
    let doc = json(&[&base[..], &["--format", "json"]].concat());
    let csv_text = stdout(&distill(&[&base[..], &["--format", "csv"]].concat()));
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let recs = records(&doc);
    assert_eq!(rows.len(), recs.len());
    assert!(!rows.is_empty());
    for (row, rec) in rows.iter().zip(recs) {
        let keys: Vec<&String> = rec.as_object().unwrap().keys().collect();
        assert_eq!(keys, headers.iter().collect::<Vec<_>>());
        for (h, cell) in headers.iter().zip(row.iter()) {
            let expected = match &rec[h] {
                Value::String(s) => s.clone(),
                Value::Array(xs) => xs.iter().map(Value::to_string).collect::<Vec<_>>().join(";"),
                Value::Null => String::new(),
                v => v.to_string(),
            };
            assert_eq!(cell, expected, "column {h}");
        }
    }
}

#[test]
fn same_config_and_seed_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"n":3,"m":1,"input":{"pair":[0.8,0.1,0.05,0.05]},
            "protocol":{"stabilizer":["ZZI","IZZ"]},"threshold":0.5,"seed":7}"#,
    );
    for cmd in ["run-perm", "run-code", "verify", "oracle-check"] {
        let a = distill(&[cmd, "--config", &cfg]);
        let b = distill(&[cmd, "--config", &cfg]);
        assert_eq!(stdout(&a), stdout(&b), "{cmd}");
    }
    let a = distill(&["verify", "--random", "8", "--seed", "3"]);
    let b = distill(&["verify", "--random", "8", "--seed", "3"]);
    assert_eq!(stdout(&a), stdout(&b));
    let c = distill(&["verify", "--random", "8", "--seed", "4"]);
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn config_file_with_permutation_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "perm.json",
        r#"{"n":2,"m":1,"input":{"werner":0.75},
            "protocol":{"permutation":{"A":["1100","0100","0010","0011"],"b":"0000"}},
            "format":"csv"}"#,
    );
    let text = stdout(&distill(&["run-perm", "--config", &cfg]));
    assert!(text.starts_with("t,prob,fidelity,"), "{text}");
    let doc = json(&["run-perm", "--config", &cfg, "--format", "json", "--werner", "0.9"]);
    let f = 0.9;
    let e = 0.1 / 3.0;
    let closed = (f * f + e * e) / (f * f + 2.0 * f * e + 5.0 * e * e);
    assert!((records(&doc)[0]["fidelity"].as_f64().unwrap() - closed).abs() < 1e-14);
}

#[test]
fn state_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let mut probs = vec![0.0; 16];
    probs[0] = 0.9;
    probs[5] = 0.1;
    let state = write(
        dir.path(),
        "state.json",
        &serde_json::json!({"n": 2, "probs": probs}).to_string(),
    );
    let doc = json(&["run-code", "--state", &state, "--generators", "ZZ"]);
    let total: f64 = records(&doc).iter().map(|r| r["prob"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-14);
}

#[test]
fn out_dir_env_names_the_file_after_the_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_distill"))
        .args(["run-code", "--werner", "0.75", "--generators", "ZZ", "--format", "csv"])
        .env("DISTILL_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(dir.path().join("run-code.csv")).unwrap();
    assert!(written.starts_with("s,prob,"));

    let file = dir.path().join("explicit.json");
    let out = distill(&["sweep", "-o", file.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    assert_eq!(doc["command"], "sweep");
}

#[test]
fn invalid_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"n":2,"m":1,"surprise":true}"#);
    let cases: Vec<Vec<&str>> = vec![
        // not symplectic
        vec!["run-perm", "--werner", "0.75", "--matrix", "1000,1000,0010,0001", "--m", "1"],
        // generators that do not commute
        vec!["run-code", "--werner", "0.75", "--generators", "ZI,XI"],
        // fidelity outside [0, 1]
        vec!["run-code", "--werner", "1.5", "--generators", "ZZ"],
        // weights that do not sum to 1
        vec!["run-code", "--pair", "0.5,0.1,0.1,0.1", "--generators", "ZZ"],
        // dense oracle size cap
        vec!["oracle-check", "--werner", "0.9", "--generators", "ZZZZZ"],
        vec!["verify", "--random", "2", "--pairs", "0"],
        vec!["sweep", "--generators", "ZZZ"],
        vec!["run-code", "--werner", "0.75"],
        vec!["no-such-command"],
        vec!["run-code", "--config", &bad],
        vec!["run-code", "--config", "/nonexistent/config.json"],
    ];
    for args in &cases {
        let out = distill(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn oracle_mismatch_exits_with_two() {
    let args = ["oracle-check", "--pair", "0.7,0.1,0.15,0.05", "--generators", "ZZ"];
    let ok = distill(&args);
    assert_eq!(ok.status.code(), Some(0));
    // Floating-point deviations are nonzero, so a zero tolerance must flag them.
    let strict = distill(&[&args[..], &["--tolerance", "0"]].concat());
    assert_eq!(strict.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("mismatch"));
    let doc: Value = serde_json::from_slice(&strict.stdout).unwrap();
    assert!(doc["summary"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn help_and_version_exit_cleanly() {
    assert_eq!(distill(&["--help"]).status.code(), Some(0));
    assert_eq!(distill(&["--version"]).status.code(), Some(0));
}
