use std::fs;

use qvm::cli::run_cli;
use serde_json::Value;

fn json(args: &[&str]) -> Value {
    let mut full = vec!["qvm", "--format", "json"];
    full.extend_from_slice(args);
    let out = run_cli(full);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

#[test]
fn shor_factors_fifteen() {
    let v = json(&["shor", "--n", "15", "--seed", "7"]);
    let f = v["factor"].as_u64().unwrap();
    assert!(f == 3 || f == 5);
    assert_eq!(v["seed"], 7);
    assert!(v["repeats"].is_array());
}

#[test]
fn grover_single_marked_item_of_four_always_succeeds() {
    let v = json(&["grover", "--n", "2", "--marked", "3", "--shots", "1000", "--seed", "1"]);
    assert_eq!(v["success_frequency"], 1.0);
    assert_eq!(v["iterations"], 1);
    assert_eq!(v["histogram"]["11"], 1000);
}

#[test]
fn same_seed_same_output() {
    let a = run_cli(["qvm", "simon", "--qubits", "4", "--secret", "1010", "--seed", "5"]);
    let b = run_cli(["qvm", "simon", "--qubits", "4", "--secret", "1010", "--seed", "5"]);
    assert_eq!(a, b);
    assert!(a.stdout.contains("1010"));
}

#[test]
fn usage_errors_exit_two_and_name_the_flag() {
    let out = run_cli(["qvm", "grover", "--n", "2", "--marked", "7"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--marked"));
    let out = run_cli(["qvm", "median", "--eps", "2"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--eps"));
    assert_eq!(run_cli(["qvm", "nonsense"]).code, 2);
    assert_eq!(run_cli(["qvm", "shor"]).code, 2);
}

#[test]
fn run_reads_circuit_and_oracle_files() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("dj.qc");
    let table = dir.path().join("f.tbl");
    fs::write(&table, "format binary\n00 0\n01 1\n10 1\n11 0\n").unwrap();
    fs::write(&circuit, "qubits 3\nnot 2\nh 2\nh 0\nh 1\nquery f 0 1 -> 2\nh 0\nh 1\nmeasure 0 1 -> x\n").unwrap();
    let v = json(&["run", circuit.to_str().unwrap(), "--oracle", &format!("f={}", table.display()), "--shots", "200"]);
    assert_eq!(v["histogram"]["x=11"], 200);
    assert_eq!(v["queries"], 1);

    let csv = run_cli(["qvm", "--format", "csv", "run", circuit.to_str().unwrap(), "--oracle", table.to_str().unwrap()]);
    assert_eq!(csv.code, 0, "{}", csv.stderr);
    assert!(csv.stdout.starts_with("outcome,count\n"));
}

#[test]
fn dj_on_table_file() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("const.tbl");
    fs::write(&table, "0 1\n1 1\n2 1\n3 1\n").unwrap();
    let v = json(&["dj", "--oracle", table.to_str().unwrap()]);
    assert_eq!(v["tag"], "Constant");
    assert_eq!(v["queries"], 1);
}

#[test]
fn qecc_demo_with_code_file() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("hamming.gen");
    fs::write(&code, "# [7,4] Hamming\n1000011\n0100101\n0010110\n0001111\n").unwrap();
    let v = json(&["qecc-demo", "--code", code.to_str().unwrap(), "--eta", "0.01", "--shots", "2000"]);
    assert_eq!(v["single_errors_corrected"], "21/21");
    assert_eq!(v["logical_qubits"], 1);
    let bad = dir.path().join("bad.gen");
    fs::write(&bad, "10x1\n").unwrap();
    let out = run_cli(["qvm", "qecc-demo", "--code", bad.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--code"));
}

#[test]
fn calculators_and_verifiers() {
    let v = json(&["threshold"]);
    assert!((v["threshold"].as_f64().unwrap() - 1.0 / 45.0).abs() < 1e-15);
    assert_eq!(v["trajectory"].as_array().unwrap().len(), 4);
    let v = json(&["qfft-verify", "--qubits", "6", "--cutoff", "3"]);
    assert!(v["approx_distance"].as_f64().unwrap() <= v["approx_bound"].as_f64().unwrap());
    let v = json(&["pathsum-verify", "--circuits", "10"]);
    assert!(v["max_amplitude_deviation"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["interference_stochastic"], serde_json::json!([0.25, 0.25, 0.25, 0.25]));
}

#[test]
fn estimation_commands() {
    let v = json(&["median", "--qubits", "5", "--eps", "0.2"]);
    let m = v["median"].as_u64().unwrap();
    assert!((10..=21).contains(&m), "{m}");
    let v = json(&["mean", "--qubits", "4", "--eps", "0.1"]);
    assert!((v["mean"].as_f64().unwrap() - v["direct_mean"].as_f64().unwrap()).abs() <= 0.1);
    let v = json(&["min", "--qubits", "5"]);
    assert_eq!(v["index"], v["classical_argmin"]);
}

#[test]
fn factoring_routes() {
    let v = json(&["kitaev-factor", "--n", "21", "--seed", "3"]);
    assert_eq!(21 % v["factor"].as_u64().unwrap(), 0);
    let v = json(&["kitaev-factor", "--n", "15", "--y", "7"]);
    assert_eq!(v["order"], 4);
    let v = json(&["rsa-demo", "--method", "kitaev"]);
    assert_eq!(v["cracked"], 33);
}

#[test]
fn text_output_is_key_value_lines() {
    let out = run_cli(["qvm", "threshold", "--levels", "1"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.lines().any(|l| l.starts_with("threshold: 0.0222")));
}
