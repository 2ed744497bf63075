use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nodaldiv(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodaldiv"))
        .args(args)
        .current_dir(cwd)
        .env_remove("NODALDIV_OUT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn generate_reports_euler_characteristic() {
    let dir = tempfile::tempdir().unwrap();
    let o = nodaldiv(&["generate", "--preset", "sphere-equator", "--level", "1", "--out", "s"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("euler characteristic 2"));
    assert!(dir.path().join("s/mesh.off").exists());

    let o = nodaldiv(&["generate", "--preset", "torus-two-meridians", "--out", "t"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("euler characteristic 0"));
    assert_eq!(out.matches("boundary c1 c2").count(), 2, "{out}");
}

#[test]
fn bad_pairing_names_the_circle() {
    let dir = tempfile::tempdir().unwrap();
    let spec = "[circles]\nc1 = 32\nc2 = 32\n[minus]\npiece = 0: c1 c2\n[plus]\npiece = 0: c1\n";
    fs::write(dir.path().join("bad.spec"), spec).unwrap();
    let o = nodaldiv(&["generate", "--spec", "bad.spec"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("c2"), "{}", stderr(&o));
}

#[test]
fn unknown_flag_and_missing_input_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(nodaldiv(&["verify", "--bogus"], dir.path()).status.code(), Some(3));
    assert_eq!(nodaldiv(&["construct", "--mesh", "absent.off"], dir.path()).status.code(), Some(3));
    assert_eq!(nodaldiv(&["construct"], dir.path()).status.code(), Some(3));
    assert_eq!(nodaldiv(&["report", "--from", "nowhere"], dir.path()).status.code(), Some(3));
    assert_eq!(nodaldiv(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn construct_retries_large_rho0() {
    let dir = tempfile::tempdir().unwrap();
    let o = nodaldiv(&["construct", "--preset", "sphere-equator", "--rho0", "1.6", "--out", "r"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("retry: rho0").count(), 4, "{out}");
    assert!(out.contains("rho0 = 0.1\n"));
    let params = fs::read_to_string(dir.path().join("r/params.txt")).unwrap();
    assert_eq!(params.matches("rejected_rho0").count(), 4);
}

#[test]
fn tampered_field_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = nodaldiv(&["construct", "--preset", "sphere-equator", "--out", "run"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let o = nodaldiv(&["verify", "--from", "run"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));

    // Flip the sign of u at the first vertex, which lies in the minus region.
    let path = dir.path().join("run/u.txt");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    let (idx, val) = lines[0].split_once(' ').unwrap();
    let v: f64 = val.parse().unwrap();
    assert!(v < 0.0);
    lines[0] = format!("{idx} {:e}", -v);
    fs::write(&path, lines.join("\n") + "\n").unwrap();

    let o = nodaldiv(&["verify", "--from", "run"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nodal_set"), "{}", stderr(&o));
    assert!(stdout(&o).contains("nodal_set          FAIL"));
    let o = nodaldiv(&["report", "--from", "run"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_writes_decreasing_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = nodaldiv(&["verify", "--preset", "torus-two-meridians", "--sweep", "0..2", "--out", "sw"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let csv = fs::read_to_string(dir.path().join("sw/sweep.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for w in rows.windows(2) {
        assert!(w[1][2] < w[0][2], "{csv}");
        assert!((w[0][1] / w[1][1] - 2.0).abs() < 1e-12);
    }
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = nodaldiv(&["verify", "--preset", "sphere-two-circles", "--out", out], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = fs::read(dir.path().join("a/report.txt")).unwrap();
    let b = fs::read(dir.path().join("b/report.txt")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn environment_overrides_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.conf"), "[run]\npreset = sphere-equator\nout = fromconf\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nodaldiv"))
        .args(["generate", "--config", "run.conf", "--out", "fromflag"])
        .current_dir(dir.path())
        .env("NODALDIV_OUT", "fromenv")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("fromenv/mesh.off").exists());
    assert!(!dir.path().join("fromflag").exists());
    assert!(!dir.path().join("fromconf").exists());

    let o = nodaldiv(&["generate", "--config", "run.conf"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("fromconf/mesh.off").exists());
}
