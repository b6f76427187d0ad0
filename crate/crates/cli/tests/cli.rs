use std::path::Path;
use std::process::{Command, Output};

use roth_core::io;
use serde_json::Value;

fn roth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roth")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn ok(args: &[&str]) -> Value {
    let out = roth(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    json(&out)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn count_full_nine() {
    let v = ok(&["count", "--N", "9", "--q", "1", "--set", "full"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["pairs"], 13);
    assert_eq!(v["free"], false);
    assert!((v["lambda_re"].as_f64().unwrap() - 13.0 / 27.0).abs() < 1e-15);
    assert_eq!(v["lambda_im"], 0.0);
    assert_eq!(ok(&["count", "--N", "9", "--set", "odd"])["pairs"], 3);
}

#[test]
fn count_as_csv() {
    let out = roth(&["count", "--N", "9", "--set", "full", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("schema,N,q,M,lambda_re,lambda_im,pairs,free"));
    assert!(lines.next().unwrap().ends_with(",13,false"));
}

#[test]
fn free_check_reports_witness() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("a.txt");
    std::fs::write(&file, "N=2\n1\n2\n").unwrap();
    let v = ok(&["free-check", "--set", p(&file)]);
    assert_eq!(v["free"], false);
    assert_eq!(v["witness"], "x=1 y=1");

    std::fs::write(&file, "N=3\n1\n3\n").unwrap();
    let v = ok(&["free-check", "--set", p(&file)]);
    assert_eq!(v["free"], true);
    assert_eq!(v["witness"], Value::Null);
}

#[test]
fn moment6_two() {
    assert_eq!(ok(&["moment6", "--N", "2"])["count"], 20);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(roth(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(roth(&["count", "--bogus"]).status.code(), Some(2));
    assert_eq!(roth(&["count", "--N", "9"]).status.code(), Some(2));
    assert_eq!(roth(&["count", "--set", "/nonexistent/set.txt"]).status.code(), Some(2));
    assert_eq!(roth(&["example1", "--N", "10"]).status.code(), Some(2));
}

#[test]
fn analytic_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("a.txt");
    std::fs::write(&file, "N=50\n1\n").unwrap();
    let out = roth(&["increment", "--set", p(&file)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["outcome"]["not_found"]["reason"], "small_n");

    // A set containing a configuration violates the precondition.
    assert_eq!(roth(&["increment", "--N", "20", "--set", "full"]).status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "N = 9\nq = 1\n[paths]\nset = \"full\"\n").unwrap();
    assert_eq!(ok(&["--config", p(&cfg), "count"])["pairs"], 13);
    // Flags override the file.
    assert_eq!(ok(&["--config", p(&cfg), "count", "--set", "odd"])["pairs"], 3);

    std::fs::write(&cfg, "N = 9\ncolour = \"red\"\n").unwrap();
    assert_eq!(roth(&["--config", p(&cfg), "count", "--set", "full"]).status.code(), Some(2));
    std::fs::write(&cfg, "delta = 3.0\n").unwrap();
    assert_eq!(roth(&["--config", p(&cfg), "moment6", "--N", "3"]).status.code(), Some(2));
}

#[test]
fn iterate_replays_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let args = ["iterate", "--N", "16384", "--set", "random-greedy", "--seed", "5", "--out", p(path)];
        assert_eq!(roth(&args).status.code(), Some(0));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    let v: Value = serde_json::from_slice(&x).unwrap();
    assert_eq!(v["schema"], 1);
    assert!(!v["trace"]["stages"].as_array().unwrap().is_empty());
    assert!(v["trace"]["termination"].is_string());
}

#[test]
fn emitted_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();

    let set_file = dir.path().join("greedy.txt");
    let v = ok(&["search-extremal", "--N", "300", "--set-out", p(&set_file)]);
    let a = io::load_set(&set_file).unwrap();
    assert_eq!(v["rows"][0]["card"], a.cardinality());
    let again = dir.path().join("again.txt");
    io::save_set(&again, &a).unwrap();
    assert_eq!(std::fs::read(&set_file).unwrap(), std::fs::read(&again).unwrap());
    assert_eq!(ok(&["free-check", "--set", p(&set_file)])["free"], true);

    let f_file = dir.path().join("osc.csv");
    ok(&["example1", "--N", "64", "--function-out", p(&f_file)]);
    let f = io::load_function(&f_file).unwrap();
    assert_eq!(f.len(), 64);
    let f_again = dir.path().join("osc2.csv");
    io::save_function(&f_again, &f).unwrap();
    assert_eq!(std::fs::read(&f_file).unwrap(), std::fs::read(&f_again).unwrap());

    let stem = dir.path().join("factor");
    let v = ok(&["regularize", "--N", "300", "--set", p(&set_file), "--delta", "0.2", "--factor-out", p(&stem)]);
    let factor = io::load_factor(&stem).unwrap();
    assert_eq!(v["atoms"], factor.atom_count());
    let stem2 = dir.path().join("factor2");
    io::save_factor(&stem2, &factor).unwrap();
    for ext in ["csv", "json"] {
        assert_eq!(
            std::fs::read(stem.with_extension(ext)).unwrap(),
            std::fs::read(stem2.with_extension(ext)).unwrap()
        );
    }

    let prefix = dir.path().join("w");
    let v = ok(&["cutnorm", "--N", "300", "--set", p(&set_file), "--balanced", "--witness-prefix", p(&prefix)]);
    let files = v["witness_files"].as_array().unwrap();
    assert_eq!(files.len(), 2);
    for file in files {
        let w = io::load_function(file.as_str().unwrap()).unwrap();
        assert!(w.sup_norm() <= 1.0 + 1e-12);
    }
}

#[test]
fn threads_do_not_change_results() {
    let run = |t: &str| ok(&["--threads", t, "cutnorm", "--N", "500", "--set", "random:0.3", "--seed", "2", "--balanced"]);
    let (a, b) = (run("1"), run("3"));
    assert!((a["lower"].as_f64().unwrap() - b["lower"].as_f64().unwrap()).abs() < 1e-12);
    assert_eq!(a["slot"], b["slot"]);
}

#[test]
fn majorarc_parity_and_weyl() {
    let v = ok(&["majorarc", "--N", "4096", "--set", "even", "--delta", "0.25", "--center"]);
    assert_eq!(v["outcome"]["status"], "found");
    assert_eq!(v["outcome"]["witness"]["alpha"]["exact"], serde_json::json!([1, 2]));

    let v = ok(&["weyl", "--N", "1000000", "--alpha", "3/7", "--delta", "0.1"]);
    assert_eq!(v["outcome"]["witness"]["q_prime"], 7);
    assert_eq!(v["outcome"]["witness"]["distance"], 0.0);
    let out = roth(&["weyl", "--N", "1000000", "--alpha", "1/6", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn spectrum_and_growth_csv() {
    let out = roth(&["spectrum", "--N", "8", "--set", "full", "--L", "16", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,re,im,modulus");
    assert_eq!(lines.len(), 17);
    assert!(lines[1].starts_with("0,8,"));

    let out = roth(&["search-extremal", "--N", "64", "128", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,card,density,ratio");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("128,"));
}
