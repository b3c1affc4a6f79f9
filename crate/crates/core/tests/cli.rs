use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn patternlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_patternlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

#[test]
fn counts_inversions() {
    let out = patternlab(&["count", "--word", "23112", "--pattern", "21"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), r#"{"count":5}"#);
}

#[test]
fn counts_arcs() {
    let out = patternlab(&["count-arcs", "--partition", "{1,3}{2,4}", "--arcs", "1-3,2-4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["count"], 1);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&patternlab(&["frobnicate"])), 2);
    assert_eq!(code(&patternlab(&["count", "--word", "23112", "--pattern", "11"])), 2);
    assert_eq!(code(&patternlab(&["count", "--word", "2x1", "--pattern", "21"])), 2);
    assert_eq!(code(&patternlab(&["sample", "--family", "setpart", "--n", "0"])), 3);
    assert_eq!(
        code(&patternlab(&["mc", "--family", "setpart", "--arcs", "1-2", "--sizes", "10", "--reps", "5"])),
        3
    );
    assert_eq!(
        code(&patternlab(&["cumulant", "--family", "setpart", "--n", "40", "--indicators", "1-2", "--method", "enum"])),
        4
    );
    assert_eq!(code(&patternlab(&["--version"])), 0);
}

#[test]
fn sampling_is_reproducible() {
    let args = ["--seed", "11", "sample", "--family", "setpart", "--n", "9", "--count", "5"];
    let a = stdout(&patternlab(&args));
    assert_eq!(a, stdout(&patternlab(&args)));
    let b = stdout(&patternlab(&["--seed", "12", "sample", "--family", "setpart", "--n", "9", "--count", "5"]));
    assert_ne!(a, b);
    let threaded = stdout(&patternlab(&[
        "--threads", "3", "--seed", "11", "sample", "--family", "setpart", "--n", "9", "--count", "5",
    ]));
    assert_eq!(a, threaded);
}

#[test]
fn wdg_scan_and_report_file() {
    let out = patternlab(&["verify", "wdg", "--family", "setpart", "--n", "8", "--order", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["violations"], Value::Array(vec![]));
    assert_eq!(v["r"], 3);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = patternlab(&[
        "verify", "wdg", "--family", "mperm", "--multiset", "1^2,2^2,3", "--order", "2", "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["violations"], Value::Array(vec![]));
}

#[test]
fn csv_outputs() {
    let out = patternlab(&["--emit", "csv", "cond-exp", "--n", "6", "--arcs", "1-3,2-4"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,P(M=m),E[Occ|m]"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1");
    assert!(first[1].parse::<f64>().unwrap() > 0.0);

    let out = patternlab(&[
        "--emit", "csv", "mc", "--family", "mperm", "--pattern", "21", "--sizes", "8,16", "--reps", "200",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("size,mean,variance,ks,k3,k4"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn exact_cumulant_as_fraction() {
    let out = patternlab(&["cumulant", "--family", "mperm", "--multiset", "1^2,2^2", "--indicators", "1:1,2:1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["order"], 2);
    // P(X=1)=1/2, P(both)=1/6, so the covariance is 1/6 - 1/4
    assert_eq!(v["cumulant"], "-1/12");
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("exp.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out/summary.json")).unwrap()).unwrap()
}

#[test]
fn batch_empty_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "output_dir = \"out\"\n");
    let out = patternlab(&["batch", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let s = summary(dir.path());
    assert_eq!(s["jobs"], Value::Array(vec![]));
    assert_eq!(s["all_pass"], true);
}

const JOBS: &str = r#"
output_dir = "out"
seed = 5

[[jobs]]
name = "inv"
kind = "count"
word = "23112"
pattern = "21"
checks = [{ path = "/count", equals = 4 }]

[[jobs]]
name = "cond"
kind = "cond-exp"
n = 6
arcs = "1-2"
checks = [{ path = "/rows/0/m", equals = 1 }]
"#;

#[test]
fn batch_failing_check_stops_early() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), JOBS);
    let out = patternlab(&["batch", "--config", cfg.to_str().unwrap()]);
    assert_ne!(code(&out), 0);
    let s = summary(dir.path());
    assert_eq!(s["jobs"][0]["status"], "failed");
    assert_eq!(s["jobs"][0]["checks"][0]["value"], 5);
    assert_eq!(s["jobs"][1]["status"], "skipped");
    assert!(dir.path().join("out/inv.json").exists());
    assert!(!dir.path().join("out/cond.json").exists());
}

#[test]
fn batch_keep_going() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), JOBS);
    let out = patternlab(&["batch", "--config", cfg.to_str().unwrap(), "--keep-going"]);
    assert_ne!(code(&out), 0);
    let s = summary(dir.path());
    assert_eq!(s["passed"], 1);
    assert_eq!(s["failed"], 1);
    assert_eq!(s["jobs"][1]["status"], "ok");
    assert!(dir.path().join("out/cond.csv").exists());
}

#[test]
fn batch_all_passing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &JOBS.replace("equals = 4", "equals = 5"));
    let out = patternlab(&["batch", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(summary(dir.path())["all_pass"], true);
}

#[test]
fn batch_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let dup = JOBS.replace("name = \"cond\"", "name = \"inv\"");
    let cfg = write_config(dir.path(), &dup);
    assert_eq!(code(&patternlab(&["batch", "--config", cfg.to_str().unwrap()])), 2);
    assert!(!dir.path().join("out").exists());

    let cfg = write_config(dir.path(), &JOBS.replace("\"21\"", "\"22\""));
    assert_eq!(code(&patternlab(&["batch", "--config", cfg.to_str().unwrap()])), 2);

    let missing = dir.path().join("nope.toml");
    assert_eq!(code(&patternlab(&["batch", "--config", missing.to_str().unwrap()])), 1);
}
