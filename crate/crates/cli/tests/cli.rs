use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn nahqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nahqc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(schedule: &Path, qubits: &str, initial: &str) -> Value {
    let out = nahqc(&[
        "simulate",
        "--schedule",
        s(schedule),
        "--qubits",
        qubits,
        "--initial",
        initial,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn amplitude(report: &Value, k: usize) -> (f64, f64) {
    let z = &report["logical_amplitudes"][k];
    (z[0].as_f64().unwrap(), z[1].as_f64().unwrap())
}

fn modulus(report: &Value, k: usize) -> f64 {
    let (re, im) = amplitude(report, k);
    re.hypot(im)
}

#[test]
fn empty_schedule_keeps_the_input() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s.json", r#"{"pulses":[]}"#);
    let r = simulate(&f, "2", "00");
    assert_eq!(amplitude(&r, 0), (1.0, 0.0));
    for k in 1..4 {
        assert_eq!(amplitude(&r, k), (0.0, 0.0));
    }
    assert_eq!(r["leakage"].as_f64().unwrap(), 0.0);
    assert_eq!(r["basis"][2], "10");
}

#[test]
fn xy_half_pi_swaps_01_and_10() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "s.json",
        r#"{"pulses":[{"type":"three_site","pair":1,"vartheta":1.5707963267948966}]}"#,
    );
    let r = simulate(&f, "2", "01");
    assert!((modulus(&r, 2) - 1.0).abs() < 1e-12);
    assert!(r["leakage"].as_f64().unwrap() < 1e-12);
    let aux = &r["site_populations"][1];
    assert!((aux[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn hadamard_pulse_on_qubit_one() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "s.json",
        r#"{"pulses":[{"type":"one_qubit","qubit":1,"theta":0.7853981633974483,"phi":0.0}]}"#,
    );
    let r = simulate(&f, "2", "00");
    assert!((modulus(&r, 0) - FRAC_1_SQRT_2).abs() < 1e-12);
    assert!((modulus(&r, 2) - FRAC_1_SQRT_2).abs() < 1e-12);
    assert!(modulus(&r, 1) < 1e-12 && modulus(&r, 3) < 1e-12);
}

#[test]
fn verify_exit_codes() {
    let out = nahqc(&["verify", "--suite", "foo"]);
    assert_eq!(out.status.code(), Some(2));

    let out = nahqc(&["verify", "--suite", "onequbit"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().filter(|l| l.starts_with("[PASS]")).count() >= 4);

    let out = nahqc(&["verify", "--suite", "twoqubit", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));
}

#[test]
fn verify_holonomy_writes_a_report() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("report.json");
    let out = nahqc(&[
        "verify",
        "--suite",
        "holonomy",
        "--samples",
        "512",
        "--out",
        s(&path),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["suites"][0]["suite"], "holonomy");
}

#[test]
fn compile_then_simulate_matches_prediction() {
    let dir = TempDir::new().unwrap();
    let circuit = write(
        &dir,
        "c.json",
        r#"{"gates":[{"kind":"rotation","qubit":1,"axis":[0,0,1],"angle":1.5707963},
                     {"kind":"xy","pair":1,"vartheta":1.5707963},
                     {"kind":"reflection","qubit":2,"n":[0.6,0.0,0.8]}]}"#,
    );
    let compiled = dir.path().join("schedule.json");
    let out = nahqc(&[
        "compile",
        "--circuit",
        s(&circuit),
        "--qubits",
        "2",
        "--out",
        s(&compiled),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&compiled).unwrap()).unwrap();
    assert_eq!(report["pulses"].as_array().unwrap().len(), 4);
    assert_eq!(report["provenance"][3]["gate_index"], 2);
    let gate = &report["predicted_logical_gate"];

    for (k, bits) in ["00", "01", "10", "11"].iter().enumerate() {
        let r = simulate(&compiled, "2", bits);
        let mut overlap = (0.0, 0.0);
        for row in 0..4 {
            let (gr, gi) = (
                gate[row][k][0].as_f64().unwrap(),
                gate[row][k][1].as_f64().unwrap(),
            );
            let (ar, ai) = amplitude(&r, row);
            overlap.0 += gr * ar + gi * ai;
            overlap.1 += gr * ai - gi * ar;
        }
        let fidelity = overlap.0 * overlap.0 + overlap.1 * overlap.1;
        assert!(fidelity >= 1.0 - 1e-8, "{bits}: {fidelity}");
    }
}

#[test]
fn outputs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let circuit = write(
        &dir,
        "c.json",
        r#"{"gates":[{"kind":"rotation","qubit":2,"axis":[0.6,0.8,0],"angle":0.3},{"kind":"xy","pair":1,"vartheta":0.9}]}"#,
    );
    let a = nahqc(&["compile", "--circuit", s(&circuit), "--qubits", "2"]);
    let b = nahqc(&["compile", "--circuit", s(&circuit), "--qubits", "2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("e0") || text.contains("e-"), "{text}");

    let schedule = write(&dir, "s.json", &text);
    let x = nahqc(&[
        "simulate",
        "--schedule",
        s(&schedule),
        "--qubits",
        "2",
        "--initial",
        "11",
    ]);
    let y = nahqc(&[
        "simulate",
        "--schedule",
        s(&schedule),
        "--qubits",
        "2",
        "--initial",
        "11",
    ]);
    assert!(x.status.success());
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn parse_errors_exit_2_with_location() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "bad.json",
        "{\"pulses\":[\n  {\"type\":\"three_site\",\"pair\":1,\"vartheta\":\"oops\"}\n]}",
    );
    let out = nahqc(&[
        "simulate",
        "--schedule",
        s(&f),
        "--qubits",
        "2",
        "--initial",
        "00",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:"), "{err}");
    assert!(err.contains("\"oops\""), "{err}");
    assert!(err.contains("pulses[0]"), "{err}");
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "s.json",
        r#"{"pulses":[{"type":"three_site","pair":2,"vartheta":0.1}]}"#,
    );
    let out = nahqc(&[
        "simulate",
        "--schedule",
        s(&f),
        "--qubits",
        "2",
        "--initial",
        "00",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = nahqc(&[
        "simulate",
        "--schedule",
        s(&f),
        "--qubits",
        "2",
        "--initial",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let c = write(
        &dir,
        "c.json",
        r#"{"gates":[{"kind":"xy","pair":1,"vartheta":0.1},{"kind":"xy","pair":3,"vartheta":0.1}]}"#,
    );
    let out = nahqc(&["compile", "--circuit", s(&c), "--qubits", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gate 1"));
}

#[test]
fn extract_gate_reports_entangling_power() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "s.json",
        r#"{"pulses":[{"type":"three_site","pair":1,"vartheta":1.5707963267948966}]}"#,
    );
    let out = nahqc(&["extract-gate", "--schedule", s(&f), "--qubits", "2"]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["exact"], true);
    assert_eq!(r["entangling"]["entangling"], true);
    assert_eq!(r["logical_gate"].as_array().unwrap().len(), 4);

    let f = write(
        &dir,
        "t.json",
        r#"{"pulses":[{"type":"three_site","pair":1,"vartheta":0.0}]}"#,
    );
    let out = nahqc(&["extract-gate", "--schedule", s(&f), "--qubits", "2"]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["entangling"]["entangling"], false);
}
