use std::process::Command;

fn mpflow() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mpflow"))
}

#[test]
fn lists_cases() {
    let out = mpflow().arg("list-cases").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["pvt_advection", "shock_tube", "laser_ablation", "triple_point", "shock_bubble"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn unknown_case_exits_with_config_code() {
    let out = mpflow().args(["run", "--case", "nope", "--out"]).arg(tempfile::tempdir().unwrap().path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown case"));
}

#[test]
fn run_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = mpflow()
        .args(["run", "--case", "pvt_advection", "--tend", "1e-4", "--snapshots", "5e-5", "--diagnostics-every", "1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["pvt_advection_0000.csv", "pvt_advection_0001.csv", "pvt_advection_0002.csv", "pvt_advection_diagnostics.csv"] {
        assert!(dir.path().join(file).exists(), "{file}");
    }
    let csv = std::fs::read_to_string(dir.path().join("pvt_advection_0002.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 11);
}

#[test]
fn riemann_profile_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exact.csv");
    let out = mpflow().args(["riemann", "--case", "shock_tube_hydro", "--cells", "50", "--out"]).arg(&path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().next(), Some("x,rho,u,p"));
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn riemann_rejects_2d_cases() {
    let out = mpflow().args(["riemann", "--case", "shock_bubble"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exported_case_runs_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = mpflow().args(["export-case", "--case", "shock_tube"]).output().unwrap();
    assert!(out.status.success());
    let path = dir.path().join("case.toml");
    std::fs::write(&path, &out.stdout).unwrap();
    let run = mpflow()
        .args(["run", "--config"])
        .arg(&path)
        .args(["--cells", "40", "--tend", "1e-5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(dir.path().join("shock_tube_0001.csv").exists());
}
