use std::path::Path;
use std::process::{Command, Output};

use visolve::format::pgm::{write_pgm, GrayImage};
use visolve::format::read_trace;
use visolve::harness::synthetic_image;

fn visolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_visolve")).args(args).output().expect("binary runs")
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn preset_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = visolve(&["preset", "network_51", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("iterations"));
    assert!(stdout.contains("tol_reached"));
    let rows = read_trace(read(&dir.path().join("trace_network_51.csv")).as_slice()).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.last().unwrap().residual < 1e-6);
}

#[test]
fn missing_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    let out = visolve(&["network", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing.txt") && err.contains("No such file"), "{err}");
}

#[test]
fn bad_arguments_exit_with_one() {
    assert_eq!(visolve(&["network", "--bogus"]).status.code(), Some(1));
    assert_eq!(visolve(&["preset", "unknown"]).status.code(), Some(1));
    assert_eq!(visolve(&["network", "--variant", "fast"]).status.code(), Some(1));
    assert_eq!(visolve(&["compare", "--variants", "mdisem"]).status.code(), Some(1));
    // linear_41b needs a strongly monotone problem
    assert_eq!(visolve(&["nash", "--variant", "linear_41b"]).status.code(), Some(1));
}

#[test]
fn out_of_range_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.txt");
    std::fs::write(&cfg, "beta = 5.0\n").unwrap();
    let out = visolve(&["network", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("beta"));
}

#[test]
fn budget_exhaustion_still_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = visolve(&["nash", "--max-iter", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("max_iter"));
}

#[test]
fn deblur_restores_a_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.pgm");
    let img = GrayImage { rows: 32, cols: 32, data: synthetic_image(32, 32) };
    write_pgm(&input, &img).unwrap();
    let out = visolve(&[
        "deblur",
        "--image",
        input.to_str().unwrap(),
        "--blur",
        "gaussian",
        "--size",
        "5",
        "--sigma",
        "1.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let restored = visolve::format::read_pgm(&dir.path().join("restored_deblur_gaussian.pgm")).unwrap();
    assert_eq!((restored.rows, restored.cols), (32, 32));
    assert!(dir.path().join("trace_deblur_gaussian.csv").exists());
    assert!(dir.path().join("observed_deblur_gaussian.pgm").exists());
}

#[test]
fn identical_arguments_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &["preset", "nash_52"],
        &["deblur", "--blur", "motion"],
        &["sweep", "--mu", "0.6", "--beta", "0.72,0.8,0.88"],
        &["compare", "--variants", "mdisem,no_inertia,mdisem"],
    ];
    for args in runs {
        for dir in [&a, &b] {
            let mut full = args.to_vec();
            full.extend(["--out", dir.path().to_str().unwrap()]);
            assert_eq!(visolve(&full).status.code(), Some(0), "{full:?}");
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 6);
    for name in names {
        assert_eq!(read(&a.path().join(&name)), read(&b.path().join(&name)), "{name:?}");
    }
}

#[test]
fn help_lists_every_flag_with_its_default() {
    let cases: [(&str, &[&str]); 6] = [
        ("network", &["--config", "--out", "--max-iter", "--tol", "--variant", "--strict", "--problem"]),
        ("nash", &["--config", "--out", "--max-iter", "--tol", "--variant", "--strict", "--problem"]),
        ("deblur", &["--image", "--blur", "--size", "--sigma", "--length", "--angle", "--as-observed", "--variant"]),
        ("sweep", &["--mu", "--beta", "--sigma-vals", "--target", "--variant", "--out"]),
        ("compare", &["--variants", "--target", "--config", "--out"]),
        ("preset", &["--variant", "--config", "--out", "--timings"]),
    ];
    for (cmd, flags) in cases {
        let out = visolve(&[cmd, "--help"]);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        for flag in flags {
            let line = text
                .lines()
                .position(|l| l.trim_start().starts_with(flag))
                .unwrap_or_else(|| panic!("{cmd}: {flag} missing"));
            // the description may wrap onto following lines
            let entry: String = text.lines().skip(line).take(3).collect();
            assert!(entry.contains("[default: "), "{cmd}: {flag} has no default\n{text}");
        }
    }
    assert_eq!(visolve(&["--help"]).status.code(), Some(0));
}
