use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nds(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nds"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn free_run_writes_the_two_step_rows() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("zero.conf");
    fs::write(&conf, "x0 = 0\ny0 = 0\nu0 = 0\n").unwrap();
    let out = nds(
        &[
            "free-run",
            "--config",
            conf.to_str().unwrap(),
            "--steps",
            "2",
            "--out",
            "run.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert_eq!(
        text,
        "t,x,y,u,gamma,D\n0,0,0,0,0,0\n1,0,0,-1,1,0\n2,0.03,0,-0.9528,0,0\n"
    );
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(nds(&["warp-drive"], dir.path()).status.code(), Some(2));
    assert_eq!(nds(&["stabilize", "--frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(
        nds(&["stabilize", "--reset", "sideways"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(nds(&["stabilize", "--tau", "0"], dir.path()).status.code(), Some(2));
    fs::write(dir.path().join("bad.conf"), "tau = 100\nnonsense\n").unwrap();
    let out = nds(&["stabilize", "--config", "bad.conf"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    fs::write(dir.path().join("zero.conf"), "tau = 0\n").unwrap();
    let out = nds(&["stabilize", "--config", "zero.conf"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tau"));
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = nds(
        &["free-run", "--steps", "10", "--out", "missing-dir/run.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing-dir/run.csv"));
    // An unreadable config file is a configuration problem, not a runtime one.
    assert_eq!(
        nds(&["free-run", "--config", "absent.conf"], dir.path()).status.code(),
        Some(2)
    );
}

#[test]
fn divergence_fails_only_under_strict() {
    let dir = tempfile::tempdir().unwrap();
    // A fixed initial condition far outside the attractor escapes quickly.
    fs::write(dir.path().join("far.conf"), "x0 = 0\ny0 = -3\nu0 = 0\n").unwrap();
    let lenient = nds(&["free-run", "--config", "far.conf", "--steps", "20000"], dir.path());
    assert_eq!(lenient.status.code(), Some(0));
    let strict = nds(
        &["free-run", "--config", "far.conf", "--steps", "20000", "--strict"],
        dir.path(),
    );
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.conf"), "seed = 1\nsteps = 50\n").unwrap();
    nds(&["free-run", "--config", "c.conf", "--out", "a.csv"], dir.path());
    nds(
        &["free-run", "--config", "c.conf", "--seed", "2", "--out", "b.csv"],
        dir.path(),
    );
    nds(
        &["free-run", "--seed", "2", "--steps", "50", "--out", "c.csv"],
        dir.path(),
    );
    let read = |name: &str| fs::read(dir.path().join(name)).unwrap();
    assert_ne!(read("a.csv"), read("b.csv"));
    assert_eq!(read("b.csv"), read("c.csv"));
    assert_eq!(String::from_utf8(read("a.csv")).unwrap().lines().count(), 52);
}

#[test]
fn reset_scan_labels_the_above_threshold_regime() {
    let dir = tempfile::tempdir().unwrap();
    let out = nds(
        &["reset-scan", "--eta0-list", "0.1", "--ics", "2", "--steps", "6000"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("reset_scan.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eta0,regime,reliability,mean_stab_time"));
    assert!(lines.next().unwrap().starts_with("0.1,above-threshold-2D,"));
}

#[test]
fn sweep_report_has_summary_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = nds(&["sweep", "--tau-list", "100", "--ics", "1", "--seed", "4"], dir.path());
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(
        text,
        "tau,stabilized,diverged,unresolved,reliability\n100,1,0,0,1\nall,1,0,0,1\n"
    );
}

#[test]
fn reconstruct_writes_both_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = nds(&["reconstruct", "--seed", "2", "--out", "orbit.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("orbit.csv").exists());
    assert!(dir.path().join("orbit.forced.csv").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("match=true"));
}
