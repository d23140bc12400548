use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn polgrad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polgrad"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn bundled(name: &str) -> String {
    format!("{}/scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn bundled_scenarios_run() {
    for name in ["lin_perp_lin.toml", "sigma_plus_minus.toml", "atom_mirror.toml"] {
        let out = polgrad(&["scan", &bundled(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.starts_with("# polgrad scan; scenario sha256="));
    }
}

#[test]
fn writes_to_file_and_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let input = bundled("sigma_plus_minus.toml");
    let mut outputs = Vec::new();
    for threads in ["1", "3", "8"] {
        let path = dir.path().join(format!("out{threads}.csv"));
        let out = polgrad(&["scan", &input, "--out", path.to_str().unwrap(), "--threads", threads]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
        outputs.push(fs::read(&path).unwrap());
    }
    assert!(outputs.iter().all(|o| *o == outputs[0]));
    assert_eq!(String::from_utf8_lossy(&outputs[0]).lines().count(), 2 + 16 * 11);
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = scenario(
        dir.path(),
        "bad.toml",
        "schema_version = 1\n[beams]\ntau_p = -1\nconfiguration = \"lin_perp_lin\"\nshape = 3\n",
    );
    let out = polgrad(&["scan", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("tau_p must be positive"), "{err}");
    assert!(err.contains("beams.shape"), "{err}");
    assert!(out.stdout.is_empty());

    let missing = dir.path().join("nope.toml");
    assert_eq!(polgrad(&["scan", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn row_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let doc = "schema_version = 1\n[beams]\nconfiguration = \"custom\"\n[[elements]]\ntype = \"gap\"\nposition = 1.0\nlength = 0.1\n[grid.x]\nvalues = [0.0, 1.0]\n[grid.v]\nvalues = [0]\n";
    let path = scenario(dir.path(), "collide.toml", doc);
    let out = polgrad(&["scan", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().nth(3).unwrap().contains("strictly increasing"));
}

#[test]
fn si_units() {
    let dir = tempfile::tempdir().unwrap();
    let doc = "schema_version = 1\n[beams]\nk = 8.0e6\ntau_p = 1.0e-6\n[grid.x]\nvalues = [0.39269908169872414]\n[grid.v]\nvalues = [0]\n";
    let path = scenario(dir.path(), "si.toml", doc);
    let out = polgrad(&["scan", path.to_str().unwrap(), "--units", "si"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().next().unwrap().ends_with("units=si"));
    let row: Vec<f64> = csv.lines().nth(2).unwrap().split(',').take(7).map(|f| f.parse().unwrap()).collect();
    // x in metres, force -(2/3) hbar k zeta0 |B|^2 in newtons
    assert!((row[2] - std::f64::consts::FRAC_PI_8 / 8.0e6).abs() < 1e-20);
    let expected = -2.0 / 3.0 * 1.054_571_817e-34 * 8.0e6 * 1e-4;
    assert!((row[4] - expected).abs() < 1e-12 * expected.abs());
}

#[test]
fn rejects_bad_flags() {
    let input = bundled("lin_perp_lin.toml");
    assert_eq!(polgrad(&["scan", &input, "--format", "json"]).status.code(), Some(1));
    assert_eq!(polgrad(&["scan", &input, "--threads", "0"]).status.code(), Some(1));
}
