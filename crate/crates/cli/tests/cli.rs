use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sawtooth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sawtooth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect()
}

#[test]
fn poincare_default_seed_set() {
    let o = sawtooth(&["poincare", "--steps", "50", "--no-timestamp"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 8 * 51);
    assert_eq!(rows.last().unwrap().split(',').next(), Some("7"));
}

#[test]
fn poincare_zero_steps_echoes_seeds() {
    let o = sawtooth(&[
        "poincare",
        "--steps",
        "0",
        "--seeds",
        "1:0,2.5:-0.5",
        "--no-timestamp",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(
        rows,
        [
            "0,0,1.000000000000e0,0.000000000000e0",
            "1,0,2.500000000000e0,-5.000000000000e-1"
        ]
    );
}

#[test]
fn config_errors_exit_with_one() {
    for args in [
        &["poincare", "--K", "NaN"][..],
        &["fidelity", "--nq", "0"],
        &["fidelity", "--initial", "sideways"],
        &["fidelity", "--epsilon", "-1"],
        &["poincare", "--seeds", "1"],
        &["scattering", "--member", "99", "--nq", "3"],
        &["tf-scan", "--deltaK", "0.1"],
        &["fidelity", "--config", "/nonexistent/run.cfg"],
        &["fidelity", "--out", "/nonexistent/dir/out.csv"],
    ] {
        let o = sawtooth(args);
        assert_eq!(
            o.status.code(),
            Some(1),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn help_succeeds() {
    assert!(sawtooth(&["--help"]).status.success());
    assert!(sawtooth(&["fidelity", "--help"]).status.success());
}

#[test]
fn circuit_check_passes() {
    let o = sawtooth(&["circuit-check", "--nq", "8", "--no-timestamp"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row = data_rows(&text)[0].to_string();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(&cols[..4], ["8", "16", "184", "200"]);
    assert!(cols[6].parse::<f64>().unwrap() < 1e-10);
    assert_eq!(cols[8], "pass");
}

#[test]
fn lyapunov_closed_form() {
    let o = sawtooth(&["lyapunov", "--K", "0.1", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["closed_form"].as_f64().unwrap() - 0.315).abs() < 1e-3);
    assert!((v["numerical"].as_f64().unwrap() / 0.315 - 1.0).abs() < 0.05);
}

fn fidelity_run(dir: &Path, name: &str, extra: &[&str]) -> (String, Value) {
    let out = dir.join(name);
    let mut args = vec![
        "fidelity",
        "--nq",
        "5",
        "--tmax",
        "40",
        "--ensemble",
        "3",
        "--epsilon",
        "0.05",
        "--no-timestamp",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = sawtooth(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let summary = std::fs::read_to_string(format!("{}.summary.json", out.display())).unwrap();
    let doc: Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(doc["experiment"]["nq"], "5");
    (csv, doc["summary"].clone())
}

#[test]
fn fidelity_is_reproducible_and_summarised() {
    let dir = tempfile::tempdir().unwrap();
    let (a, summary) = fidelity_run(dir.path(), "a.csv", &["--seed", "7"]);
    let (b, _) = fidelity_run(dir.path(), "b.csv", &["--seed", "7", "--jobs", "1"]);
    let (c, _) = fidelity_run(dir.path(), "c.csv", &["--seed", "8"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.contains("# seed=7\n"));
    assert_eq!(data_rows(&a).len(), 41);
    assert_eq!(summary["status"], "decay");
    assert_eq!(summary["n_g"], 80);
    assert!(summary["rate"].as_f64().unwrap() > 0.0);
    assert!((summary["lyapunov"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-3);
}

#[test]
fn output_header_reruns_the_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let (a, _) = fidelity_run(
        dir.path(),
        "a.csv",
        &["--seed", "11", "--K", "-0.5", "--regime", "static"],
    );
    let cfg: String = a
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter(|l| l.contains('='))
        .map(|l| format!("{l}\n"))
        .collect();
    let cfg_path = dir.path().join("rerun.cfg");
    std::fs::write(&cfg_path, cfg).unwrap();
    let out = dir.path().join("rerun.csv");
    let o = sawtooth(&[
        "fidelity",
        "--config",
        cfg_path.to_str().unwrap(),
        "--no-timestamp",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(out).unwrap(), a);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# test\nnq=4\ntmax=5\nseed=3\nepsilon=0.02\n").unwrap();
    let o = sawtooth(&[
        "fidelity",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "4",
        "--no-timestamp",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("# nq=4\n") && text.contains("# seed=4\n"));
    assert!(text.contains("# epsilon=0.02\n"));
    assert_eq!(data_rows(&text).len(), 6);
}

#[test]
fn null_perturbation_reports_no_decay() {
    let o = sawtooth(&[
        "fidelity",
        "--nq",
        "4",
        "--tmax",
        "20",
        "--epsilon",
        "0",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["status"], "no decay");
    assert!(v["curve"]["f_mean"]
        .as_array()
        .unwrap()
        .iter()
        .all(|f| (f.as_f64().unwrap() - 1.0).abs() < 1e-12));
}

#[test]
fn timestamp_line_is_optional() {
    let with = stdout(&sawtooth(&["lyapunov", "--steps", "10"]));
    let without = stdout(&sawtooth(&["lyapunov", "--steps", "10", "--no-timestamp"]));
    assert!(with.contains("# created_unix="));
    assert!(!without.contains("created_unix"));
}

#[test]
fn scattering_matches_direct_overlap() {
    let o = sawtooth(&[
        "scattering",
        "--nq",
        "4",
        "--t",
        "6",
        "--ensemble",
        "2",
        "--member",
        "1",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for r in rows {
        let d = r["f_circuit"].as_f64().unwrap() - r["f_direct"].as_f64().unwrap();
        assert!(d.abs() < 1e-12);
    }
    let sampled = sawtooth(&["scattering", "--nq", "4", "--t", "3", "--shots", "1000"]);
    assert!(sampled.status.success());
}

#[test]
fn sweeps_emit_tables() {
    let o = sawtooth(&[
        "tf-scan",
        "--nqs",
        "4,5",
        "--epsilons",
        "0.05,0.1",
        "--ensemble",
        "4",
        "--tmax",
        "8",
        "--no-timestamp",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("nq,epsilon,t_f,collapse\n"));
    assert_eq!(data_rows(&text).len(), 4);

    let o = sawtooth(&[
        "rate-vs-k",
        "--nq",
        "5",
        "--ks",
        "-0.5,2",
        "--initials",
        "random,gaussian",
        "--epsilon",
        "0.08",
        "--ensemble",
        "3",
        "--tmax",
        "60",
        "--no-timestamp",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("-0.5,random,"));
}
