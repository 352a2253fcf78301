use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn tnvs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tnvs"))
        .args(args)
        .env_remove("TNVS_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn simulate(dir: &Path, setting: &str, extra: &[&str]) -> PathBuf {
    let out_dir = dir.to_str().unwrap();
    let mut args = vec![
        "simulate",
        "--setting",
        setting,
        "--seed",
        "7",
        "--out",
        out_dir,
    ];
    args.extend_from_slice(extra);
    let out = tnvs(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stem = if setting == "toy" {
        "toy".to_owned()
    } else {
        format!("setting{setting}")
    };
    dir.join(format!("{stem}.csv"))
}

/// JSON text with every wall-clock field zeroed.
fn strip_timings(json: &[u8]) -> String {
    let mut v: Value = serde_json::from_slice(json).unwrap();
    v["timings"]["total_ms"] = Value::from(0.0);
    for t in v["selection_trace"].as_array_mut().unwrap() {
        t["elapsed_ms"] = Value::from(0.0);
    }
    serde_json::to_string_pretty(&v).unwrap()
}

#[test]
fn toy_selection_document() {
    let tmp = TempDir::new().unwrap();
    let csv = simulate(tmp.path(), "toy", &["--n", "2000"]);
    let out = tnvs(&[
        "select",
        "--input",
        csv.to_str().unwrap(),
        "--response",
        "Y",
        "--seed",
        "3",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["version"], "1");
    assert_eq!(doc["config"]["seed"], 3);
    assert_eq!(doc["config"]["d_max"], 264);
    let names = |key: &str| -> Vec<String> {
        let mut v: Vec<String> = doc["subsets"][key]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["name"].as_str().unwrap().to_owned())
            .collect();
        v.sort();
        v
    };
    assert_eq!(names("uninformative"), ["X6"]);
    assert_eq!(names("cond_independent"), ["X3", "X5"]);
    assert_eq!(names("selected").len(), 2);
    assert_eq!(names("redundant").len(), 1);
    let t = doc["termination"].as_str().unwrap();
    assert!(
        t == "relevance-below-threshold" || t == "undefined-codec",
        "{t}"
    );
    assert_eq!(doc["selection_trace"].as_array().unwrap().len(), 2);
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("Relevant predictors (2)"), "{text}");
}

#[test]
fn output_identical_across_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let csv = simulate(tmp.path(), "1", &["--n", "300", "--p", "200"]);
    let run = |threads: &str| {
        let out = tnvs(&[
            "--threads",
            threads,
            "select",
            "--input",
            csv.to_str().unwrap(),
            "--response",
            "Y",
            "--seed",
            "11",
            "--quiet",
        ]);
        assert_eq!(code(&out), 0);
        strip_timings(&out.stdout)
    };
    let one = run("1");
    assert_eq!(one, run("2"));
    assert_eq!(one, run("8"));
}

#[test]
fn seed_from_environment() {
    let tmp = TempDir::new().unwrap();
    let csv = simulate(tmp.path(), "toy", &["--n", "200"]);
    let out = Command::new(env!("CARGO_BIN_EXE_tnvs"))
        .args([
            "select",
            "--input",
            csv.to_str().unwrap(),
            "--response",
            "Y",
            "--quiet",
        ])
        .env("TNVS_SEED", "42")
        .output()
        .unwrap();
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["seed"], 42);
}

#[test]
fn dmax_one_stops_after_first_pick() {
    let tmp = TempDir::new().unwrap();
    let csv = simulate(tmp.path(), "toy", &["--n", "300"]);
    let json = tmp.path().join("out.json");
    let out = tnvs(&[
        "select",
        "--input",
        csv.to_str().unwrap(),
        "--response",
        "Y",
        "--dmax",
        "1",
        "--output",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert_eq!(doc["termination"], "d_max-reached");
    assert_eq!(doc["subsets"]["selected"].as_array().unwrap().len(), 1);
}

#[test]
fn foci_mode_has_no_redundant_subset() {
    let tmp = TempDir::new().unwrap();
    let csv = simulate(tmp.path(), "toy", &["--n", "300"]);
    let out = tnvs(&[
        "select",
        "--input",
        csv.to_str().unwrap(),
        "--response",
        "Y",
        "--mode",
        "foci",
        "--quiet",
    ]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["mode"], "foci");
    assert!(doc["subsets"]["redundant"].as_array().unwrap().is_empty());
}

#[test]
fn simulate_writes_truth_sidecar() {
    let tmp = TempDir::new().unwrap();
    let csv = simulate(tmp.path(), "2", &["--n", "50", "--p", "100"]);
    let head = std::fs::read_to_string(&csv).unwrap();
    let header = head.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 101);
    assert_eq!(head.lines().count(), 51);
    let truth = std::fs::read_to_string(tmp.path().join("setting2.truth.csv")).unwrap();
    assert_eq!(truth.lines().next().unwrap(), "column_name,label,group_id");
    assert_eq!(truth.lines().count(), 101);
    assert_eq!(
        truth
            .lines()
            .filter(|l| l.contains(",relevant-signal,"))
            .count(),
        4
    );
}

#[test]
fn codec_subcommand() {
    let tmp = TempDir::new().unwrap();
    let csv = simulate(tmp.path(), "toy", &["--n", "1000"]);
    let path = csv.to_str().unwrap();
    let out = tnvs(&[
        "codec", "--input", path, "--y", "Y", "--x", "X2", "--given", "X1",
    ]);
    assert_eq!(code(&out), 0);
    let t: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!(t > 0.2 && t <= 1.0, "{t}");
    let out = tnvs(&[
        "codec", "--input", path, "--y", "Y", "--x", "X3", "--given", "X1,X2",
    ]);
    assert_eq!(code(&out), 0);
    let t: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!(t < 0.1, "{t}");
    let out = tnvs(&["codec", "--input", path, "--y", "Y", "--x", "X99"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn bench_reports_table_and_json() {
    let out = tnvs(&[
        "bench",
        "--setting",
        "toy",
        "--n",
        "300",
        "--reps",
        "2",
        "--datasets",
        "1",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["reps"], 2);
    assert_eq!(report["runs"].as_array().unwrap().len(), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("TNVS"));
}

#[test]
fn usage_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let csv = simulate(tmp.path(), "toy", &["--n", "50"]);
    let path = csv.to_str().unwrap();
    let dir = tmp.path().to_str().unwrap();
    for args in [
        vec!["select", "--input", path],
        vec!["select", "--input", path, "--response", "Y", "--dmax", "0"],
        vec![
            "select",
            "--input",
            path,
            "--response",
            "Y",
            "--alpha1",
            "-1",
        ],
        vec![
            "select",
            "--input",
            path,
            "--response",
            "Y",
            "--mode",
            "lasso",
        ],
        vec!["simulate", "--setting", "1", "--p", "15", "--out", dir],
        vec!["simulate", "--setting", "4", "--out", dir],
        vec!["bench", "--setting", "1", "--reps", "0"],
        vec!["frobnicate"],
    ] {
        let out = tnvs(&args);
        assert_eq!(
            code(&out),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn data_errors_exit_1() {
    let tmp = TempDir::new().unwrap();
    let write = |name: &str, body: &str| {
        let p = tmp.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_owned()
    };
    let cases = [
        tmp.path().join("missing.csv").to_str().unwrap().to_owned(),
        write("bad_cell.csv", "Y,X1\n1,2\n2,abc\n3,4\n"),
        write("ragged.csv", "Y,X1\n1,2\n2\n3,4\n"),
        write("short.csv", "Y,X1\n1,2\n"),
        write("only_y.csv", "Y\n1\n2\n3\n"),
        write("nan.csv", "Y,X1\n1,2\n2,NaN\n3,4\n"),
    ];
    for path in &cases {
        let out = tnvs(&["select", "--input", path, "--response", "Y"]);
        assert_eq!(
            code(&out),
            1,
            "{path}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
    let ok = write("ok.csv", "Y,X1\n1,2\n2,3\n3,4\n");
    let out = tnvs(&["select", "--input", &ok, "--response", "Z"]);
    assert_eq!(code(&out), 1);
}
