//! End-to-end tests of the `arcplan` binary: exit codes, file outputs,
//! determinism, and the plan/verify round trip.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_arcplan"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

const SCENARIO: &str = "\
arcplan scenario v1
u_max 1.0
drag 0.1
inflation 0.4
start -6.0 -1.0
goal 6.0 1.0
v_start 0.0
v_end 0.0
obstacle -2.8 -0.5  -1.2 -0.5  -1.2 1.1  -2.8 1.1
obstacle 0.8 -1.9  2.2 -1.9  2.2 -0.5  0.8 -0.5
obstacle 1.9 1.4  3.1 1.4  3.1 2.6  1.9 2.6
";

fn write_scenario(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("scenario.txt");
    std::fs::write(&path, SCENARIO).unwrap();
    path
}

#[test]
fn plan_writes_outputs_and_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    let out_dir = dir.path().join("out");

    let out = run(&[
        "plan",
        scenario.to_str().unwrap(),
        "-o",
        out_dir.to_str().unwrap(),
        "--svg",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("total_time"));
    assert!(stdout.contains("kappa_m"));
    assert!(out_dir.join("trajectory.txt").exists());
    assert!(out_dir.join("report.txt").exists());
    let svg = std::fs::read_to_string(out_dir.join("scene.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("polyline"));

    let verify = run(&[
        "verify",
        out_dir.join("trajectory.txt").to_str().unwrap(),
        scenario.to_str().unwrap(),
    ]);
    assert!(
        verify.status.success(),
        "{}",
        String::from_utf8_lossy(&verify.stderr)
    );
    assert!(String::from_utf8_lossy(&verify.stdout).contains("overall: pass"));
}

#[test]
fn repeated_plans_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for out in [&out1, &out2] {
        let r = run(&[
            "plan",
            scenario.to_str().unwrap(),
            "-o",
            out.to_str().unwrap(),
            "--svg",
        ]);
        assert!(r.status.success());
    }
    for name in ["trajectory.txt", "report.txt", "scene.svg"] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn malformed_scenario_exits_3_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "arcplan scenario v1\nu_max oops\n").unwrap();
    let out = run(&["plan", path.to_str().unwrap(), "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "stderr: {err}");
    assert!(err.contains("u_max"), "stderr: {err}");

    let missing = run(&["plan", "/nonexistent/path.txt"]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn goal_in_inflation_ring_is_invalid() {
    // The goal is outside the polygon but inside its inflation ring.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inside.txt");
    std::fs::write(
        &path,
        "arcplan scenario v1\nu_max 1.0\ndrag 0.1\ninflation 0.5\nstart -4.0 0.0\ngoal 1.2 0.0\nobstacle -1.0 -1.0  1.0 -1.0  1.0 1.0  -1.0 1.0\n",
    )
    .unwrap();
    let out = run(&["plan", path.to_str().unwrap(), "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("goal"));
}

#[test]
fn verify_rejects_tampered_and_mismatched_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    let out_dir = dir.path().join("out");
    let r = run(&[
        "plan",
        scenario.to_str().unwrap(),
        "-o",
        out_dir.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let traj_path = out_dir.join("trajectory.txt");

    // Tampered acceleration spike: audit failure, exit 1.
    let text = std::fs::read_to_string(&traj_path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mid = lines.len() / 2;
    let cols: Vec<&str> = lines[mid].split_whitespace().collect();
    let tampered = format!(
        "{} {} {} {} {} 9.0e0 9.0e0 {}",
        cols[0], cols[1], cols[2], cols[3], cols[4], cols[7]
    );
    lines[mid] = tampered;
    let spiked = dir.path().join("spiked.txt");
    std::fs::write(&spiked, lines.join("\n") + "\n").unwrap();
    let out = run(&[
        "verify",
        spiked.to_str().unwrap(),
        scenario.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max_accel_norm"));

    // Scenario hash mismatch: exit 3.
    let other = dir.path().join("other.txt");
    std::fs::write(&other, SCENARIO.replace("0.4", "0.41")).unwrap();
    let out = run(&["verify", traj_path.to_str().unwrap(), other.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn coarse_resampling_passes_with_widened_tolerance_flag() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    let out_dir = dir.path().join("out");
    let r = run(&[
        "plan",
        scenario.to_str().unwrap(),
        "-o",
        out_dir.to_str().unwrap(),
        "--dt",
        "5e-3",
    ]);
    assert!(r.status.success());
    let out = run(&[
        "verify",
        out_dir.join("trajectory.txt").to_str().unwrap(),
        scenario.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("tolerance widened"));
}
