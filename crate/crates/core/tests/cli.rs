use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use poroelastic::catalog;
use poroelastic::cli_io::{parse_config, EXIT_NUMERICAL, EXIT_OK, EXIT_PARSE, EXIT_VALIDATION};
use poroelastic::params::BoundaryKind;

fn catalog_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../catalog").join(format!("{name}.cfg"))
}

fn run(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poroelastic"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn catalog_files_match_builtin_sets() {
    for (name, params) in catalog::all() {
        let text = std::fs::read_to_string(catalog_path(name)).unwrap();
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.params, params, "{name}");
        assert_eq!(cfg.bc, BoundaryKind::MixedA3, "{name}");
    }
}

#[test]
fn classify_prints_regime() {
    let expected = [
        ("p_exp", "Exponential"),
        ("p_case1", "NonExpCase1"),
        ("p_case2", "NonExpCase2"),
        ("p_case3", "NonExpCase3"),
    ];
    for (name, class) in expected {
        let out = run(&["classify"], &catalog_path(name));
        assert_eq!(code(&out), EXIT_OK);
        let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(json["class"], class, "{name}");
    }
}

#[test]
fn probe_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_poroelastic"))
        .args(["probe", "--out"])
        .arg(dir.path())
        .arg("--config")
        .arg(catalog_path("p_case3"))
        .output()
        .unwrap();
    assert_eq!(code(&out), EXIT_OK);
    let csv = std::fs::read_to_string(dir.path().join("probe.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("probe.json")).unwrap()).unwrap();
    let s = json["exponent"].as_f64().unwrap();
    assert!((s - 2.0).abs() < 0.1, "exponent {s}");
}

#[test]
fn spectrum_and_simulate_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(catalog_path("p_case1"))
        .unwrap()
        .replace("n_max = 200", "n_max = 25")
        .replace("modes = 64", "modes = 8")
        .replace("t_end = 20.0", "t_end = 1.0")
        .replace("output_every = 1", "output_every = 10");
    let cfg = write_config(dir.path(), &text);
    let out_dir = dir.path().join("out");
    for cmd in ["spectrum", "simulate", "decay-fit"] {
        let out = Command::new(env!("CARGO_BIN_EXE_poroelastic"))
            .arg(cmd)
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert_eq!(code(&out), EXIT_OK, "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let scan = std::fs::read_to_string(out_dir.join("scan.csv")).unwrap();
    assert_eq!(scan.lines().count(), 1 + 25);
    let traj = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().count(), 1 + 101);
    assert!(out_dir.join("spectrum.json").exists());
    assert!(out_dir.join("decay_fit.json").exists());
}

#[test]
fn unknown_key_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(catalog_path("p_exp")).unwrap().replace("tau4 = 1.0", "tau4 = 1.0\ntau5 = 1");
    let out = run(&["classify"], &write_config(dir.path(), &text));
    assert_eq!(code(&out), EXIT_PARSE);
    assert!(String::from_utf8_lossy(&out.stderr).contains("tau5"));
}

#[test]
fn missing_file_is_a_parse_error() {
    let out = run(&["validate"], Path::new("/nonexistent/run.cfg"));
    assert_eq!(code(&out), EXIT_PARSE);
}

#[test]
fn bad_tolerance_is_rejected() {
    let out = run(&["classify", "--tol", "-1"], &catalog_path("p_exp"));
    assert_eq!(code(&out), EXIT_PARSE);
}

#[test]
fn validation_failure_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(catalog_path("p_exp")).unwrap().replace("alpha1 = 1.0", "alpha1 = 0.001");
    let cfg = write_config(dir.path(), &text);

    let out = run(&["validate"], &cfg);
    assert_eq!(code(&out), EXIT_VALIDATION);
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha1*mu-b^2"));

    let out = run(&["classify"], &cfg);
    assert_eq!(code(&out), EXIT_VALIDATION);
    assert!(out.stdout.is_empty());

    let out = run(&["classify", "--override-validation"], &cfg);
    assert_eq!(code(&out), EXIT_OK);
    assert!(!out.stdout.is_empty());
}

#[test]
fn numerical_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(catalog_path("p_exp"))
        .unwrap()
        .replace("modes = 64", "modes = 2")
        .replace("dt = 0.001", "dt = 1e300")
        .replace("t_end = 20.0", "t_end = 2e300");
    let out = run(&["decay-fit"], &write_config(dir.path(), &text));
    assert_eq!(code(&out), EXIT_NUMERICAL, "{}", String::from_utf8_lossy(&out.stderr));
}
