use std::fs;
use std::process::{Command, Output};

fn zpgd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zpgd"))
        .args(args)
        .env_remove("ZPGD_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_example_writes_report_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = zpgd(&[
        "run",
        "--example",
        "eigen_ball3d",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("max_residual"));
    assert!(out.join("run_report.txt").exists());
    assert!(out.join("eigenvalues.csv").exists());
}

#[test]
fn exit_codes_separate_parse_validation_and_check_failures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let out = dir.path().join("o");
    let run = |extra: &[&str]| {
        let mut args = vec![
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        zpgd(&args)
    };

    fs::write(&cfg, "name = \"broken\"\nmode = [\n").unwrap();
    assert_eq!(run(&[]).status.code(), Some(2));

    let good = fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/scenarios/eigen_annulus3d.toml"
    ))
    .unwrap();
    fs::write(&cfg, good.replace("count = 30", "count = 0")).unwrap();
    assert_eq!(run(&[]).status.code(), Some(3));

    fs::write(&cfg, &good).unwrap();
    assert_eq!(run(&[]).status.code(), Some(0));
    assert_eq!(run(&["--tolerance-scale", "1e-12"]).status.code(), Some(1));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = zpgd(&[
            "--threads",
            "1",
            "run",
            "--example",
            "inviscid_outflow",
            "--out",
            d.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in [
        "solution.csv",
        "boundary.csv",
        "comparison.csv",
        "run_report.txt",
    ] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn list_and_eigen_subcommands() {
    let o = zpgd(&["list-scenarios"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["ball2d_outflow", "riemann_delta3d", "viscosity_sweep2d"] {
        assert!(text.contains(name), "{name}");
    }

    let o = zpgd(&[
        "eigen",
        "--case",
        "ball2d",
        "--r-outer",
        "1",
        "--count",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,root,residual");
    assert_eq!(lines.len(), 4);
    // first nonzero zero of J1
    let root: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((root - 3.831_705_970_207_512).abs() < 1e-10);

    let o = zpgd(&["eigen", "--case", "disc", "--r-outer", "1"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn every_bundled_scenario_passes_within_a_minute() {
    let dir = tempfile::tempdir().unwrap();
    let o = zpgd(&["verify", "--out", dir.path().to_str().unwrap()]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    let mut count = 0;
    for line in text
        .lines()
        .filter(|l| l.starts_with("PASS ") || l.starts_with("FAIL "))
    {
        assert!(line.starts_with("PASS "), "{line}");
        let secs: f64 = line
            .rsplit('(')
            .next()
            .unwrap()
            .trim_end_matches(" s)")
            .parse()
            .unwrap();
        assert!(secs < 60.0, "{line}");
        count += 1;
    }
    assert_eq!(count, 20);
}
