use std::fs;
use std::path::Path;

use zpgd::scenario::{gallery, run_scenario, Scenario, ScenarioError, Tolerances};

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn identical_configs_give_identical_files() {
    for name in ["eigen_annulus2d", "riemann_delta3d", "ball2d_outflow"] {
        let s = gallery::load(name).unwrap();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run_scenario(&s, a.path(), Tolerances::default()).unwrap();
        run_scenario(&s, b.path(), Tolerances::default()).unwrap();
        let (fa, fb) = (files(a.path()), files(b.path()));
        assert!(fa.iter().any(|(n, _)| n == "run_report.txt"));
        assert!(fa.iter().any(|(n, _)| n.ends_with(".csv")));
        assert_eq!(fa, fb, "{name}");
    }
}

#[test]
fn csv_values_carry_seventeen_significant_digits() {
    let s = gallery::load("eigen_ball2d").unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_scenario(&s, dir.path(), Tolerances::default()).unwrap();
    let text = fs::read_to_string(dir.path().join("eigenvalues.csv")).unwrap();
    let row = text.lines().nth(1).unwrap();
    let root = row.split(',').nth(1).unwrap();
    let mantissa = root.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{root}");
}

#[test]
fn malformed_and_invalid_configs_are_distinguished() {
    let bad = Scenario::from_toml("name = \"x\"\nmode = \"freespace\"\n[grid\n");
    assert!(matches!(bad, Err(ScenarioError::Parse(_))));
    assert_eq!(bad.unwrap_err().exit_code(), 2);

    let unknown = Scenario::from_toml("name = \"x\"\nmode = \"eigen\"\ncolour = 3\n");
    assert!(matches!(unknown, Err(ScenarioError::Parse(_))));

    let text = gallery::source("eigen_ball2d")
        .unwrap()
        .replace("r_outer = ", "r_outer = -");
    let s = Scenario::from_toml(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let err = run_scenario(&s, dir.path(), Tolerances::default()).unwrap_err();
    assert!(matches!(err, ScenarioError::Validation(_)), "{err}");
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn tolerance_scale_loosens_checks() {
    let s = gallery::load("eigen_ball3d").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let tight = run_scenario(&s, dir.path(), Tolerances { scale: 1e-12 }).unwrap();
    assert!(!tight.passed());
    let loose = run_scenario(&s, dir.path(), Tolerances { scale: 10.0 }).unwrap();
    assert!(loose.passed());
    assert!(fs::read_to_string(dir.path().join("run_report.txt"))
        .unwrap()
        .contains("result: PASS"));
}
