use std::process::Command;

use melnikov_lab::perturbation::{params_to_perturbation, MelnikovParams, PerturbationSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_melnikov-lab"));
    c.env("MELNIKOV_LAB_THREADS", "2");
    c
}

fn write_spec(dir: &std::path::Path, name: &str, spec: &PerturbationSpec) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, spec.to_json()).unwrap();
    p
}

#[test]
fn eval_prints_csv_grid() {
    let dir = tempfile::tempdir().unwrap();
    let spec = params_to_perturbation(&MelnikovParams { a: 1.0, b: -0.5, c: -1.0, ..Default::default() }, 0, false).unwrap();
    let path = write_spec(dir.path(), "spec.json", &spec);
    let out = bin().args(["melnikov", "eval", "--spec"]).arg(&path).args(["--grid", "0.05:0.95:0.05"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,M1,N1");
    assert_eq!(lines.len(), 20);
    let fields: Vec<f64> = lines[10].split(',').map(|f| f.parse().unwrap()).collect();
    let r = fields[0];
    assert!((fields[1] - (1.0 - 0.5 * r - r * r)).abs() < 1e-12);
    assert!((fields[2] - (-1.0 - 0.5 * r + r * r)).abs() < 1e-12);
    assert!(String::from_utf8(out.stderr).unwrap().contains("\"input_digest\""));
}

#[test]
fn quadcheck_random_m3_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = PerturbationSpec::random(3, false, &mut ChaCha8Rng::seed_from_u64(11));
    let path = write_spec(dir.path(), "spec.json", &spec);
    let out = bin().args(["quadcheck", "--spec"]).arg(&path).args(["--tol", "1e-9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("max discrepancy "));
}

#[test]
fn realize_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().current_dir(dir.path()).args(["realize", "--i", "4", "--j", "0", "--m", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out.json.manifest.json").exists());
    let out = bin().current_dir(dir.path()).args(["verify", "--spec", "out.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "[[4,0]] certified\n");
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = PerturbationSpec::random(2, false, &mut ChaCha8Rng::seed_from_u64(5));
    let path = write_spec(dir.path(), "spec.json", &spec);
    let run = |args: &[&str]| {
        let mut c = bin();
        c.args(args).arg("--spec").arg(&path).arg("--json");
        c.output().unwrap().stdout
    };
    for args in [&["melnikov", "eval"][..], &["melnikov", "zeros"], &["verify"]] {
        assert_eq!(run(args), run(args));
    }
    let a = bin().current_dir(dir.path()).args(["realize", "--i", "2", "--j", "1", "--m", "2", "--seed", "3", "--out", "a.json"]).output().unwrap();
    let b = bin().current_dir(dir.path()).args(["realize", "--i", "2", "--j", "1", "--m", "2", "--seed", "3", "--out", "b.json"]).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(std::fs::read(dir.path().join("a.json")).unwrap(), std::fs::read(dir.path().join("b.json")).unwrap());
}

#[test]
fn invalid_spec_is_rejected_before_computation() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"m": 1, "holomorphic": false, "plus": [[{"re": 0, "im": 0}]], "minus": []}"#).unwrap();
    let out = bin().args(["verify", "--spec"]).arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["verify", "--spec"]).arg(dir.path().join("missing.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_and_certification_exit_codes() {
    assert_eq!(bin().arg("no-such-command").output().unwrap().status.code(), Some(64));
    assert_eq!(bin().args(["verify", "--bogus"]).output().unwrap().status.code(), Some(64));
    // m = 2 [[5,0]] is searched for and not found
    let dir = tempfile::tempdir().unwrap();
    let out = bin().current_dir(dir.path()).args(["realize", "--i", "5", "--j", "0", "--m", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_reports_the_m0_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let spec = params_to_perturbation(&MelnikovParams { a: 1.0, b: -0.5, c: -1.0, ..Default::default() }, 0, false).unwrap();
    let path = write_spec(dir.path(), "spec.json", &spec);
    let traj = dir.path().join("traj.csv");
    let out = bin()
        .args(["simulate", "--spec"])
        .arg(&path)
        .args(["--eps", "1e-3", "--seeds", "16", "--trajectory-x0", "-0.2", "--trajectory-out"])
        .arg(&traj)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "section_point,radius_in_w,predicted_r0,deviation,stable");
    assert_eq!(lines.len(), 2);
    let radius: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((radius - 0.780776).abs() < 0.05);
    assert!(std::fs::read_to_string(&traj).unwrap().starts_with("t,re_z,im_z\n"));
    let big = bin().args(["simulate", "--spec"]).arg(&path).args(["--eps", "0.5"]).output().unwrap();
    assert_eq!(big.status.code(), Some(1));
}

#[test]
fn ect_check_and_audit() {
    let out = bin().args(["ect-check"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = bin().args(["ect-check", "--basis", "g", "--m", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = bin().args(["audit-remarks", "--json"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["gamma_ratio"], -8.0);
}
