use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ab-solenoid"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .unwrap()
}

#[test]
fn phase_defaults_write_csv() {
    let d = tempfile::tempdir().unwrap();
    let out = run(&["phase"], d.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(d.path().join("phase.csv")).unwrap();
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "gauge,loop,winding,phase,expected,error");
    assert!(body[1].starts_with("symmetric,circle,1.0000000000000000e0,-3.14159265358979"));
    assert!(body[2].starts_with("landau2,circle,"));
    let checks = fs::read_to_string(d.path().join("phase_checks.csv")).unwrap();
    assert!(checks
        .lines()
        .skip_while(|l| l.starts_with('#'))
        .skip(1)
        .all(|l| l.contains(",true,")));
}

#[test]
fn config_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("bad.cfg");
    fs::write(&cfg, "solenoid.R = 1\nsolenoid.R = 2\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "phase"], d.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("given twice"));
    let out = run(&["--config", "/nonexistent/file.cfg"], d.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["--format", "xml"], d.path()).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_three_and_name_the_operation() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("near.cfg");
    fs::write(&cfg, "approach.r_end = 1.0001\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "approach"], d.path());
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("approach") && err.contains("radial approach"), "{err}");
}

#[test]
fn json_and_precision() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("p.cfg");
    fs::write(&cfg, "# short numbers\noutput.precision = 6\n").unwrap();
    assert_eq!(
        run(&["--config", cfg.to_str().unwrap(), "ramp"], d.path())
            .status
            .code(),
        Some(0)
    );
    let csv = fs::read_to_string(d.path().join("ramp.csv")).unwrap();
    let row = csv.lines().filter(|l| !l.starts_with('#')).nth(1).unwrap();
    assert!(row.split(',').all(|c| c.len() <= 12), "{row}");

    assert_eq!(run(&["--format", "json", "ramp"], d.path()).status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("ramp.json")).unwrap()).unwrap();
    assert_eq!(v["scenario"], "ramp");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert!(v["wall_clock_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn failing_check_exits_one() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("loose.cfg");
    // a short solenoid is too far from the long-solenoid limit
    fs::write(&cfg, "quantum.lengths = 5\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "quantum"], d.path());
    let code = out.status.code();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        code == Some(1) && text.contains("FAIL alpha_limit_l5"),
        "{code:?} {text}"
    );
}
