//! Exit codes and outputs of the command-line tool.

use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_spiked-pca")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn sweep_writes_all_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for format in ["csv", "json", "svg"] {
        let (code, _, err) = run(&[
            "sweep-sigma", "--p", "20", "--n", "15", "--signal-norm", "2", "--grid", "0:1:0.5", "--trials", "3",
            "--seed", "1", "--out", out, "--format", format,
        ]);
        assert_eq!(code, 0, "{err}");
    }
    let csv = std::fs::read_to_string(dir.path().join("sweep_sigma.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("grid_value,p,n,sigma"));
    assert!(std::fs::read_to_string(dir.path().join("sweep_sigma.svg")).unwrap().starts_with("<svg"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep_sigma.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 3);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"p": 30, "n": 20, "signal_norm": 2.0, "sigma": 5.0}"#).unwrap();
    let (code, out, err) = run(&["phase", "--config", cfg.to_str().unwrap(), "--sigma", "1"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(out.contains("lambda_limit"), "{v}");
}

#[test]
fn regime_violation_exits_with_two() {
    let (code, _, err) = run(&["wishart-bound", "--p", "10", "--n", "50"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn failing_signal_condition_exits_with_two() {
    let (code, _, _) = run(&["coverage", "--p", "200", "--n", "50", "--signal-norm", "0.5", "--sigma", "1", "--trials", "10"]);
    assert_eq!(code, 2);
}

#[test]
fn descending_grid_exits_with_two() {
    let (code, _, _) = run(&["sweep-sigma", "--p", "5", "--n", "5", "--signal-norm", "1", "--grid", "1,0.5", "--trials", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn missing_input_exits_with_one() {
    let (code, _, _) = run(&["arrowhead-solve", "--input", "/nonexistent/arrow.json"]);
    assert_eq!(code, 1);
}

#[test]
fn unwritable_output_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let (code, _, _) = run(&[
        "sweep-n", "--p", "5", "--signal-norm", "1", "--sigma", "1", "--grid", "5,10", "--trials", "1", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn arrowhead_solve_reads_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.json");
    std::fs::write(&input, r#"{"head": 2.0, "shaft": [1.0], "tail": [0.0]}"#).unwrap();
    let (code, out, err) = run(&["arrowhead-solve", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let values = v["eigenvalues"].as_array().unwrap();
    assert!((values[0].as_f64().unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-14);
}

#[test]
fn lawley_prediction_without_trials() {
    let (code, out, err) = run(&["lawley", "--alphas", "3,1,1,1,1", "--n", "2000"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["predicted_means"][0].as_f64().unwrap() - 3.003).abs() < 1e-12);
    assert!(v["predicted_means"][1].is_null());
}
