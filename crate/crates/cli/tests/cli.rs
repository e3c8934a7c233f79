use std::path::PathBuf;
use std::process::{Command, Output};

use qrl_gkp::noise::read_csv;

fn qrl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrl-gkp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qrl-gkp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn required_prints_one_decimal() {
    let out = qrl(&["required", "--gate", "CZ", "--perr", "1e-2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "11.9\n");
}

#[test]
fn table2_has_eight_rows() {
    let out = qrl(&["table2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gate,p_err,db");
    assert_eq!(lines.len(), 9);
    assert!(lines.contains(&"I,1e-2,10.0"));
    assert!(lines.contains(&"CZ+,1e-3,13.7"));
}

#[test]
fn verify_passes() {
    let out = qrl(&["verify"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 11);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        qrl(&["required", "--gate", "T", "--perr", "0.1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qrl(&["required", "--gate", "I", "--perr", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qrl(&["rates", "--bogus"]).status.code(), Some(2));
    assert_eq!(qrl(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qrl(&["sweep", "--steps", "1"]).status.code(), Some(2));
}

#[test]
fn computation_errors_exit_one() {
    let out = qrl(&["required", "--gate", "I", "--perr", "0.999"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert_eq!(
        qrl(&["sweep", "--db-min", "18", "--db-max", "8"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        qrl(&["compile", "--circuit", "/nonexistent/circuit.json"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn sweep_csv_round_trips_and_is_stable() {
    let path = scratch("sweep.csv");
    let args = [
        "sweep",
        "--db-min",
        "8",
        "--db-max",
        "18",
        "--steps",
        "11",
        "--out",
        path.to_str().unwrap(),
    ];
    assert!(qrl(&args).status.success());
    let first = std::fs::read(&path).unwrap();
    let rows = read_csv(first.as_slice()).unwrap();
    assert_eq!(rows.len(), 11 * 11);
    let mut again = Vec::new();
    qrl_gkp::noise::write_csv(&rows, &mut again).unwrap();
    assert_eq!(again, first);
    assert!(qrl(&args).status.success());
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn rates_json() {
    let out = qrl(&["rates", "--gate", "I", "--db", "10", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let p = v[0]["p_err"].as_f64().unwrap();
    assert!((p - 0.0101).abs() < 1e-3);
    assert_eq!(v[0]["gate"], "I");
}

#[test]
fn gates_lists_table() {
    let out = qrl(&["gates", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 11);
    assert_eq!(v[1]["gate"], "H");
    assert_eq!(
        v[1]["angles_rad"][0].as_f64().unwrap(),
        3.0 * std::f64::consts::FRAC_PI_4
    );
}

#[test]
fn compile_and_simulate_circuit() {
    let circuit = scratch("circuit.json");
    std::fs::write(
        &circuit,
        r#"{"n_qubits": 2, "gates": [{"kind": "H", "targets": [0]}, {"kind": "CZ+", "targets": [0, 1]}]}"#,
    )
    .unwrap();
    let out = qrl(&["compile", "--circuit", circuit.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 3);
    assert_eq!(steps[2]["arity"], 2);

    let args = [
        "simulate",
        "--circuit",
        circuit.to_str().unwrap(),
        "--db",
        "12",
        "--shots",
        "5000",
        "--seed",
        "3",
    ];
    let a = qrl(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&qrl(&args)));
    let report: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(report["config"]["shots"], 5000);
    assert_eq!(report["steps"].as_array().unwrap().len(), 3);
}

#[test]
fn simulate_gate_report() {
    let out = qrl(&[
        "simulate",
        "--gate",
        "P+",
        "--db",
        "10",
        "--shots",
        "20000",
        "--decoder",
        "modular",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["config"]["decoder"], "modular");
    assert_eq!(v["quadratures"].as_array().unwrap().len(), 2);
    // gate and circuit are mutually exclusive
    assert_eq!(qrl(&["simulate", "--db", "10"]).status.code(), Some(2));
}
