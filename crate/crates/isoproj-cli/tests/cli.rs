//! End-to-end checks of the compiled binary: exit codes and CSV artifacts.

use std::process::Command;

fn isoproj() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isoproj"))
}

#[test]
fn certify_success_exits_zero_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("certify.csv");
    let status = isoproj()
        .args(["certify", "--n", "1", "--m", "1", "--ct", "0.25"])
        .args(["--samples", "200", "--grid", "4", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sample,chart_norm,phi_norm,qualifies,det,margin"
    );
    assert_eq!(lines.count(), 200);
    assert!(text.ends_with('\n'));
    assert!(!text.contains('\r'));
}

#[test]
fn config_errors_exit_two() {
    let status = isoproj()
        .args(["certify", "--n", "1", "--m", "2", "--ct", "0.1"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // missing required field
    let status = isoproj()
        .args(["certify", "--n", "1", "--m", "1"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // c_t above the admissible maximum
    let status = isoproj()
        .args(["certify", "--n", "1", "--m", "1", "--ct", "0.9"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn budget_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dim.csv");
    let status = isoproj()
        .args(["dim-experiment", "--n", "1", "--m", "1", "--level", "16"])
        .args(["--set", "four-corner-cantor", "--planes", "10", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn config_file_round_trip_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.toml");
    std::fs::write(
        &config_path,
        "command = \"det-check\"\nn = 2\nm = 1\nsamples = 50\n",
    )
    .unwrap();
    let out = dir.path().join("det.csv");
    let output = isoproj()
        .arg("det-check")
        .arg("--config")
        .arg(&config_path)
        .args(["--samples", "25", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(
        stdout.contains("det-check n=2 m=1 seed=0 samples=25"),
        "{stdout}"
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 26);
    assert_eq!(
        text.lines().next().unwrap(),
        "sample,det_closed,det_numeric,rel_err"
    );
}

#[test]
fn det_check_reports_tiny_relative_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("det.csv");
    let output = isoproj()
        .args([
            "det-check",
            "--n",
            "3",
            "--m",
            "2",
            "--samples",
            "1000",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    let max_rel_err: f64 = stdout
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix("max_rel_err="))
        .expect("summary carries max_rel_err")
        .parse()
        .unwrap();
    assert!(max_rel_err <= 1e-10, "max_rel_err {max_rel_err}");
}

#[test]
fn plot_flag_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dim.csv");
    let plot = dir.path().join("dim.svg");
    let status = isoproj()
        .args([
            "dim-experiment",
            "--n",
            "1",
            "--m",
            "1",
            "--level",
            "5",
            "--planes",
            "5",
            "--out",
        ])
        .arg(&out)
        .arg("--plot")
        .arg(&plot)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let svg = std::fs::read_to_string(&plot).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("slope"));
}
