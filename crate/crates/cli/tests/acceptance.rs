//! Acceptance: byte-identical reruns of every shipped scenario, plus the
//! exit-code contract.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_gbdt")
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

/// Runs one command into `out`, returning the exit code.
fn run(command: &str, scenario: &str, out: &Path) -> i32 {
    let status = Command::new(binary())
        .arg(command)
        .arg(scenario_dir().join(scenario))
        .arg("--out")
        .arg(out)
        .status()
        .expect("spawn gbdt");
    status.code().expect("exit code")
}

/// All files in a directory as name -> bytes.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).expect("read out dir") {
        let entry = entry.expect("dir entry");
        let name = entry.file_name().to_string_lossy().to_string();
        out.insert(name, std::fs::read(entry.path()).expect("read file"));
    }
    out
}

/// Criterion 9: two consecutive runs of every shipped example scenario
/// produce byte-identical output files.
#[test]
fn criterion_9_byte_identical_reruns() {
    let plan: &[(&str, &str, i32)] = &[
        ("validate", "zero_generator.json", 0),
        ("propagate", "zero_generator.json", 0),
        ("transform", "zero_generator.json", 0),
        ("validate", "symmetric_unit.json", 0),
        ("propagate", "symmetric_unit.json", 0),
        ("transform", "symmetric_unit.json", 0),
        ("weyl", "symmetric_unit.json", 0),
        ("dynamic", "symmetric_unit.json", 0),
        ("validate", "dynamics_hamiltonian.json", 0),
        ("propagate", "dynamics_hamiltonian.json", 0),
        ("transform", "dynamics_hamiltonian.json", 0),
        ("dynamic", "dynamics_hamiltonian.json", 0),
        ("validate", "sl_darboux.json", 0),
        ("propagate", "sl_darboux.json", 0),
        ("transform", "sl_darboux.json", 0),
        ("validate", "general_constant.json", 0),
        ("propagate", "general_constant.json", 0),
        ("transform", "general_constant.json", 0),
        ("indef-model", "indef_model_n1.json", 0),
        ("validate", "invalid_triple.json", 2),
    ];
    let root = tempfile::tempdir().expect("tempdir");
    for (idx, (command, scenario, expected_code)) in plan.iter().enumerate() {
        let out_a = root.path().join(format!("{idx}_a"));
        let out_b = root.path().join(format!("{idx}_b"));
        let code_a = run(command, scenario, &out_a);
        let code_b = run(command, scenario, &out_b);
        assert_eq!(
            code_a, *expected_code,
            "{command} {scenario}: expected exit {expected_code}, got {code_a}"
        );
        assert_eq!(code_a, code_b, "{command} {scenario}: exit codes differ");
        let snap_a = snapshot(&out_a);
        let snap_b = snapshot(&out_b);
        assert!(
            !snap_a.is_empty(),
            "{command} {scenario}: no output files written"
        );
        assert_eq!(
            snap_a.keys().collect::<Vec<_>>(),
            snap_b.keys().collect::<Vec<_>>(),
            "{command} {scenario}: file sets differ"
        );
        for (name, bytes_a) in &snap_a {
            assert_eq!(
                bytes_a,
                &snap_b[name],
                "{command} {scenario}: {name} differs between runs"
            );
        }
    }
    println!("[PASS] criterion 9: byte-identical outputs over {} runs", plan.len());
}

/// The exit-code contract for the documented failure classes.
#[test]
fn exit_codes_reflect_failure_classes() {
    let tmp = tempfile::tempdir().expect("tempdir");

    // Missing scenario file: schema error.
    let code = Command::new(binary())
        .arg("validate")
        .arg(tmp.path().join("missing.json"))
        .arg("--out")
        .arg(tmp.path().join("o0"))
        .status()
        .expect("spawn")
        .code()
        .unwrap();
    assert_eq!(code, 1);

    // Malformed JSON: schema error.
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, b"{ not json").unwrap();
    let code = Command::new(binary())
        .arg("validate")
        .arg(&bad)
        .arg("--out")
        .arg(tmp.path().join("o1"))
        .status()
        .expect("spawn")
        .code()
        .unwrap();
    assert_eq!(code, 1);

    // Weyl on a scenario without a weyl block: schema error.
    let code = run("weyl", "zero_generator.json", &tmp.path().join("o2"));
    assert_eq!(code, 1);

    // Identity violation: exit 2 and the report records the residual.
    let out = tmp.path().join("o3");
    let code = run("validate", "invalid_triple.json", &out);
    assert_eq!(code, 2);
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    let check = &report["checks"][0];
    assert_eq!(check["name"], "triple_identity");
    assert_eq!(check["pass"], false);
    // The hand-computable absolute residual of the rejected example is 2.
    let absolute = report["extras"]["identity_residual_absolute"].as_f64().unwrap();
    assert!((absolute - 2.0).abs() < 1e-12);
}

/// CSV cells are finite numbers or the literal NA token; no NaN or inf
/// strings ever appear.
#[test]
fn csv_cells_are_finite_or_na() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out = tmp.path().join("model");
    assert_eq!(run("indef-model", "indef_model_n1.json", &out), 0);
    let text = std::fs::read_to_string(out.join("model.csv")).unwrap();
    for (line_no, line) in text.lines().enumerate().skip(1) {
        for cell in line.split(',') {
            if cell == "NA" || cell == "true" || cell == "false" {
                continue;
            }
            let value: f64 = cell
                .parse()
                .unwrap_or_else(|_| panic!("line {line_no}: unparsable cell {cell}"));
            assert!(value.is_finite(), "line {line_no}: non-finite value {cell}");
        }
    }
}
