use std::fs;
use std::process::{Command, Output};

fn qslkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qslkit"))
        .args(args)
        .env_remove("QSLKIT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).filter(|r| r.starts_with(' ')))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn jc_point() {
    let o = qslkit(&["jc", "--lambda", "15", "--gamma0", "40", "--coherence", "0.6", "--sz", "0.6", "--tau", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!((field(&out, "tau_qsl_op") - 0.612649806126).abs() < 1e-11);
    assert!(out.contains("non-markovian"));
}

#[test]
fn dephasing_point_json() {
    let o = qslkit(&["dephasing", "--eta", "1", "--s", "3", "--coherence", "0.5", "--tau", "1", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["model"], "dephasing");
    let op = v["result"]["tau_qsl_op"].as_f64().unwrap();
    assert!((op - v["closed_form"].as_f64().unwrap()).abs() < 1e-6);
}

#[test]
fn invalid_parameters_exit_2() {
    let o = qslkit(&["jc", "--lambda", "-1", "--gamma0", "40", "--coherence", "0.6", "--tau", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qslkit(&["jc", "--lambda", "15", "--gamma0", "40", "--coherence", "0.6", "--rx", "0.1", "--tau", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qslkit(&["jc", "--lambda", "15", "--gamma0", "40", "--coherence", "0.9", "--sz", "0.9", "--tau", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qslkit(&["scan", "--model", "jc", "--axis1", "coherence:0:1:1", "--axis2", "sz:-1:1:3", "--lambda", "15", "--gamma0", "40"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn quadrature_failure_exits_1() {
    let o = qslkit(&[
        "jc", "--lambda", "15", "--gamma0", "40", "--coherence", "0.6", "--sz", "0.6", "--tau", "1",
        "--nodes", "5", "--max-refinements", "0", "--rel-tol", "1e-14",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("converge"));
}

#[test]
fn unwritable_output_exits_3() {
    let o = qslkit(&[
        "scan", "--model", "jc", "--axis1", "coherence:0:1:3", "--axis2", "sz:-1:1:3",
        "--lambda", "15", "--gamma0", "40", "-o", "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = qslkit(&["--config", "/nonexistent-dir/a.cfg", "jc"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn failed_verification_exits_4() {
    let o = qslkit(&[
        "verify", "--check", "pure-state", "--model", "dephasing",
        "--nodes", "5", "--max-refinements", "0", "--rel-tol", "0.5",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("[FAIL]"));
}

#[test]
fn verify_norm_ordering_passes() {
    let o = qslkit(&["verify", "--check", "norm-ordering", "--samples", "2000", "--seed", "7"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("seed 7"));
    assert!(out.contains("[PASS]"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# bath\nlambda = 15\ngamma0 = 5\ncoherence = 0\nsz = 0.6\ntau = 1\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let o = qslkit(&["jc", "--config", cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!((field(&stdout(&o), "tau_qsl_op") - 0.6).abs() < 1e-9);

    let o = qslkit(&["--config", cfg, "jc", "--gamma0", "40"]);
    assert!(o.status.success());
    assert!((field(&stdout(&o), "tau_qsl_op") - 0.544075236227).abs() < 1e-9);

    fs::write(dir.path().join("bad.cfg"), "lambda 15\n").unwrap();
    let o = qslkit(&["jc", "--config", dir.path().join("bad.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_to_file_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("s.csv");
    let o = qslkit(&[
        "scan", "--model", "jc", "--axis1", "coherence:0:1:5", "--axis2", "sz:-1:1:4",
        "--lambda", "15", "--gamma0", "40", "-o", csv_path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("20 cells"));
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(reader.headers().unwrap().len(), 25);
    assert_eq!(reader.records().count(), 20);

    let json_path = dir.path().join("s.json");
    let o = qslkit(&[
        "scan", "--model", "dephasing", "--axis1", "coherence:0:1:3", "--axis2", "s:0.5:3:3",
        "--eta", "1", "-o", json_path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(v["tool"], "qslkit");
    assert_eq!(v["records"].as_array().unwrap().len(), 9);
}

#[test]
fn scan_to_stdout_keeps_summary_on_stderr() {
    let o = qslkit(&[
        "scan", "--model", "jc", "--axis1", "coherence:0:1:3", "--axis2", "sz:-1:1:3",
        "--lambda", "15", "--gamma0", "40",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("model,axis1_name"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("9 cells"));
}

#[test]
fn help_states_units() {
    let o = qslkit(&["jc", "--help"]);
    assert!(stdout(&o).contains("unit"));
}
