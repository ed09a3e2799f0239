//! End-to-end runs of the `morse-susy` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morse-susy")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn ham_csv_is_symmetric_tridiagonal() {
    let o = run(&["ham", "--s", "1.75", "--n", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,n,h_mn"));
    let rows: Vec<(usize, usize, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 10);
    let entry = |m, n| rows.iter().find(|r| r.0 == m && r.1 == n).unwrap().2;
    assert_eq!(entry(1, 2), entry(2, 1));
    assert_eq!(entry(2, 1), -3.0);
    assert_eq!(entry(0, 0), 2.0);
}

#[test]
fn spectrum_json_echoes_config_and_reports_plateau() {
    let o = run(&["spectrum", "--s", "2.5", "--n", "400", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["s"], 2.5);
    assert_eq!(v["config"]["command"], "spectrum");
    let rows = v["data"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][1].as_f64().unwrap(), 2.75);
    assert!(v["data"]["summary"]["plateau_change"].as_f64().unwrap() < 1e-6);
}

#[test]
fn coherent_summary_goes_to_stderr_in_csv_mode() {
    let o = run(&["coherent", "--x", "0.3", "--p", "-1.2", "--n", "60"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 61);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("norm_sqr:") && err.contains("tail_bound:"));
    let p_line = err.lines().find(|l| l.starts_with("p_tilde:")).unwrap();
    let p: f64 = p_line.split(':').nth(1).unwrap().trim().parse().unwrap();
    assert!((p + 1.2).abs() < 1e-12);
}

#[test]
fn wavefunction_on_negative_grid() {
    let o = run(&["wavefunction", "--beta", "-0.3+0.4i", "--grid", "-2:6:9", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["data"]["rows"].as_array().unwrap().len(), 9);
    assert!(v["data"]["summary"]["max_abs_diff"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["config"]["grid"]["count"], 9);
}

#[test]
fn basis_writes_to_file() {
    let path = std::env::temp_dir().join(format!("morse-susy-basis-{}.csv", std::process::id()));
    let o = run(&["basis", "--n-max", "3", "--quad-points", "5", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.starts_with("y,phi_0,phi_1,phi_2,phi_3\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn invalid_input_exits_with_one() {
    for args in [
        &["coherent", "--beta", "1.2"][..],
        &["coherent", "--beta", "0.1", "--x", "0", "--p", "0"],
        &["basis", "--grid", "3:1:10"],
        &["resolution", "--s", "0.4"],
        &["spectrum", "--s", "0"],
        &["spectrum", "--n-eigen", "900", "--n", "100"],
        &["nonsense"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn help_exits_with_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify"));
}

#[test]
fn displace_reports_unit_fidelity() {
    let o = run(&["displace", "--x", "0.2", "--p", "0.5", "--quick"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let get = |name: &str| -> f64 {
        text.lines().find(|l| l.starts_with(&format!("{name},"))).unwrap().split(',').nth(1).unwrap().parse().unwrap()
    };
    assert!(get("unitarity_defect") < 1e-10);
    assert!((get("fidelity") - 1.0).abs() < 1e-9);
    assert!(get("reversed_ordering_max_diff") < 1e-8);
}
