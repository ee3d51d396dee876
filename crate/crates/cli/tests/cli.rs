use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkdforge"))
        .args(args)
        .env_remove("QKDFORGE_SEED")
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["teleport"]).status.code(), Some(2));
    assert_eq!(run(&["codes", "show", "no-such-code"]).status.code(), Some(2));
    assert_eq!(run(&["css", "encode", "--key", "0101"]).status.code(), Some(2));
    assert_eq!(run(&["distill", "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    let out = run(&["css", "build", "--c1", "hamming74", "--c2", "hamming74"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert!(out.stdout.is_empty());
}

#[test]
fn hamming_table_has_eight_rows() {
    let r = json_ok(&["codes", "table", "hamming74", "--t", "1"]);
    let table = r["outputs"]["table"].as_array().unwrap();
    assert_eq!(table.len(), 8);
    assert!(table.contains(&serde_json::json!({"syndrome": "110", "error": "1000000"})));

    let out = run(&["codes", "table", "hamming74", "--t", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert_eq!(text.lines().next(), Some("syndrome,error"));
}

#[test]
fn report_envelope() {
    let r = json_ok(&["codes", "show", "parity4"]);
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["command", "config", "outputs", "timing", "seed"] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert_eq!(r["command"], serde_json::json!(["codes", "show", "parity4"]));
    assert!(r["timing"].is_null());
    let timed = json_ok(&["codes", "show", "parity4", "--timing"]);
    assert!(timed["timing"]["elapsed_ms"].is_f64());
}

#[test]
fn shor_preskill_run_yields_one_bit_key() {
    let r = json_ok(&["bb84", "run", "--mode", "shor-preskill", "--c1", "hamming74", "--seed", "7"]);
    let t = &r["outputs"];
    for k in ["d", "b", "bobBases", "sifted", "checkIdx", "mismatches", "aborted", "xMinusU", "uHat", "key"] {
        assert!(t.get(k).is_some(), "missing {k}");
    }
    assert_eq!(t["aborted"], false);
    assert_eq!(t["key"].as_str().unwrap().len(), 1);
    assert_eq!(t["keysMatch"], true);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["config"]["n"], 7);
}

#[test]
fn seeded_runs_are_bit_identical() {
    for args in [
        &["bb84", "run", "--eve", "intercept", "--n", "20", "--seed", "3"][..],
        &["bb84", "sweep", "--runs", "12", "--seed", "5"][..],
        &["qec", "shor", "--qubit", "4", "--seed", "9"][..],
        &["css", "correct", "--e1", "0001000", "--e2", "0100000", "--seed", "2"][..],
        &["distill", "--e1", "0000001", "--seed", "11"][..],
        &["reproduce", "--seed", "1"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn seed_can_come_from_the_environment() {
    let via_flag = run(&["bb84", "run", "--n", "10", "--seed", "42"]);
    let via_env = Command::new(env!("CARGO_BIN_EXE_qkdforge"))
        .args(["bb84", "run", "--n", "10"])
        .env("QKDFORGE_SEED", "42")
        .output()
        .unwrap();
    let a: Value = serde_json::from_slice(&via_flag.stdout).unwrap();
    let b: Value = serde_json::from_slice(&via_env.stdout).unwrap();
    assert_eq!(a["outputs"], b["outputs"]);
    assert_eq!(b["seed"], 42);
}

#[test]
fn sweep_csv_columns() {
    let out = run(&["bb84", "sweep", "--runs", "4", "--n", "12"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("seed,qber,sifted_len,aborted,key,keys_match"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn codes_load_from_matrix_files() {
    let mut g = tempfile::NamedTempFile::new().unwrap();
    writeln!(g, "# hamming generator\n1000110\n0100111\n0010101\n0001011").unwrap();
    let mut h = tempfile::NamedTempFile::new().unwrap();
    writeln!(h, "1110100\n1101010\n0111001").unwrap();
    let named = json_ok(&["codes", "show", "hamming74"]);
    let from_g = json_ok(&["codes", "show", g.path().to_str().unwrap()]);
    let check_arg = format!("check:{}", h.path().to_str().unwrap());
    let from_h = json_ok(&["codes", "show", &check_arg]);
    let words = |r: &Value| {
        let mut w: Vec<String> = serde_json::from_value(r["outputs"]["codewords"].clone()).unwrap();
        w.sort();
        w
    };
    assert_eq!(words(&named), words(&from_g));
    assert_eq!(words(&named), words(&from_h));
}

#[test]
fn reproduce_passes() {
    let r = json_ok(&["reproduce"]);
    assert_eq!(r["outputs"]["failed"], 0);
    assert!(r["outputs"]["passed"].as_u64().unwrap() > 20);
}

#[test]
fn qec_demos_restore_the_state() {
    for args in [
        &["qec", "bitflip", "--qubit", "3"][..],
        &["qec", "phaseflip", "--qubit", "1", "--projective"][..],
        &["qec", "shor", "--qubit", "8", "--error", "y"][..],
        &["css", "correct", "--c1", "parity4", "--key", "11", "--x", "0001"][..],
    ] {
        let r = json_ok(args);
        let f = r["outputs"]["fidelity"].as_f64().unwrap();
        assert!((f - 1.0).abs() < 1e-9, "{args:?}: {f}");
    }
}
