//! End-to-end runs of the `panel-flutter` binary on the shipped configs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use cuf_flutter::eigen::COMPLEX_TOLERANCE;
use panel_flutter::{load_config, parse_config, ConfigError};

const BIN: &str = env!("CARGO_BIN_EXE_panel-flutter");

/// Wall-clock budget for each reduced-mesh run of a shipped config.
const SMOKE_BUDGET: Duration = Duration::from_secs(120);

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> PathBuf {
    configs_dir().join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Data rows of a CSV written by the tool, header row first.
fn rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .expect("readable csv");
    reader.records().map(|r| r.expect("valid row")).collect()
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let all = rows(path);
    let idx = all[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    all[1..].iter().map(|r| r[idx].to_string()).collect()
}

fn numbers(path: &Path, name: &str) -> Vec<f64> {
    column(path, name).iter().map(|v| v.parse().expect("number")).collect()
}

fn meta(path: &Path, key: &str) -> Option<String> {
    let prefix = format!("# {key}: ");
    fs::read_to_string(path).unwrap().lines().find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// A shipped config with extra keys appended to `[solver]`, saved in `dir`.
fn patched(name: &str, solver_lines: &str, dir: &Path) -> PathBuf {
    let text = fs::read_to_string(config(name)).unwrap();
    assert!(text.contains("[solver]\n"));
    let path = dir.join(name);
    fs::write(&path, text.replace("[solver]\n", &format!("[solver]\n{solver_lines}\n"))).unwrap();
    path
}

#[test]
fn every_shipped_config_loads() {
    let mut count = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.to_case().unwrap();
            count += 1;
        }
    }
    assert_eq!(count, 6);
}

#[test]
fn every_shipped_config_runs_on_a_coarse_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 6] = [
        ("angle_ply_modes.toml", &["convergence", "--ladder", "4,6", "--no-flutter"]),
        ("clamped_convergence.toml", &["convergence", "--ladder", "4,6"]),
        ("thickness_cccc.toml", &["sweep", "--mesh", "6", "6"]),
        ("thickness_ssss.toml", &["sweep", "--mesh", "6", "6"]),
        ("aspect_ratio_sweep.toml", &["sweep", "--mesh", "6", "6", "--values", "0.5,1,2"]),
        ("flow_angle_sweep.toml", &["sweep", "--mesh", "6", "6", "--values", "0,45,90"]),
    ];
    for (name, args) in cases {
        let path = config(name);
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--config", path.to_str().unwrap()]);
        let t = Instant::now();
        let o = run(&full, dir.path());
        let elapsed = t.elapsed();
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
        assert!(elapsed <= SMOKE_BUDGET, "{name} took {elapsed:?}");
        let stem = name.trim_end_matches(".toml");
        let csv = dir.path().join(format!("{stem}_{}.csv", args[0]));
        assert!(rows(&csv).len() >= 3, "{name}: too few rows");
        for status in column(&csv, "status") {
            assert_eq!(status, "ok", "{name}");
        }
    }
}

#[test]
fn modes_match_reference_frequencies() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("angle_ply_modes.toml");
    let o = run(&["modes", "--config", cfg.to_str().unwrap(), "--mesh", "14", "14"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = dir.path().join("angle_ply_modes_modes.csv");
    let omega_bar = numbers(&csv, "omega_bar");
    for (got, want) in omega_bar.iter().zip([2.4413, 5.0508, 6.2475]) {
        assert!(rel(*got, want) <= 0.02, "{got} vs {want}");
    }
    assert_eq!(meta(&csv, "mesh").as_deref(), Some("14x14"));
}

#[test]
fn flutter_matches_reference_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("clamped_convergence.toml");
    let o = run(&["flutter", "--config", cfg.to_str().unwrap(), "--mesh", "14", "14"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = dir.path().join("clamped_convergence_flutter.csv");
    let lambda = numbers(&csv, "lambda_star_cr")[0];
    let omega = numbers(&csv, "omega_star_cr")[0];
    assert!(rel(lambda, 479.88) <= 0.02, "lambda* {lambda}");
    assert!(rel(omega, 47.24) <= 0.02, "omega* {omega}");
    assert_eq!(column(&csv, "damped"), ["false"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("lambda*_cr"));
    // the trace ends at the first unstable sample
    let trace = dir.path().join("clamped_convergence_flutter_trace.csv");
    let indicator = numbers(&trace, "indicator");
    assert!(indicator.len() >= 2);
    assert!(indicator[..indicator.len() - 1].iter().all(|&v| v <= COMPLEX_TOLERANCE));
    assert!(*indicator.last().unwrap() > COMPLEX_TOLERANCE);
}

#[test]
fn damped_override_raises_the_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("clamped_convergence.toml");
    let base = ["flutter", "--config", cfg.to_str().unwrap(), "--mesh", "8", "8"];
    let undamped = dir.path().join("undamped");
    let damped = dir.path().join("damped");
    assert_eq!(code(&run(&base, &undamped)), 0);
    let mut args = base.to_vec();
    args.extend(["--damped", "true"]);
    let o = run(&args, &damped);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let u = numbers(&undamped.join("clamped_convergence_flutter.csv"), "lambda_star_cr")[0];
    let d_csv = damped.join("clamped_convergence_flutter.csv");
    let d = numbers(&d_csv, "lambda_star_cr")[0];
    assert_eq!(column(&d_csv, "damped"), ["true"]);
    assert!(d >= u, "damped {d} < undamped {u}");
    assert!(rel(d, u) < 0.1);
}

#[test]
fn output_is_reproducible_apart_from_the_run_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("flow_angle_sweep.toml");
    let args = ["sweep", "--config", cfg.to_str().unwrap(), "--mesh", "5", "5", "--values", "0,30", "--threads", "2"];
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    assert_eq!(code(&run(&args, &first)), 0);
    assert_eq!(code(&run(&args, &second)), 0);
    let strip = |p: &Path| -> String {
        fs::read_to_string(p).unwrap().lines().filter(|l| !l.starts_with("# run:")).collect::<Vec<_>>().join("\n")
    };
    let mut compared = 0;
    for entry in fs::read_dir(&first).unwrap() {
        let name = entry.unwrap().file_name();
        let (a, b) = (first.join(&name), second.join(&name));
        if name.to_string_lossy().ends_with(".csv") {
            assert_eq!(strip(&a), strip(&b), "{name:?}");
        } else {
            assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{name:?}");
        }
        compared += 1;
    }
    assert_eq!(compared, 3);
}

#[test]
fn flow_angle_sweep_reports_its_trend() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("flow_angle_sweep.toml");
    let o = run(
        &["sweep", "--config", cfg.to_str().unwrap(), "--mesh", "10", "10", "--values", "0,20,90"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = dir.path().join("flow_angle_sweep_sweep.csv");
    let lambda = numbers(&csv, "lambda_star_cr");
    // a peak off the fibre axis and the weakest direction across it
    assert!(lambda[1] > lambda[0] && lambda[0] > lambda[2], "{lambda:?}");
    assert_eq!(column(&csv, "change"), ["", "+", "-"]);
    assert_eq!(meta(&csv, "axis").as_deref(), Some("flow_angle"));
    assert!(meta(&csv, "lambda_star_trend").is_some());
    let dat = fs::read_to_string(dir.path().join("flow_angle_sweep_sweep_lambda.dat")).unwrap();
    assert_eq!(dat.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).count(), 3);
}

#[test]
fn missing_flutter_writes_the_trace_and_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = patched("clamped_convergence.toml", "lambda_max = 50.0", dir.path());
    let o = run(&["flutter", "--config", cfg.to_str().unwrap(), "--mesh", "5", "5"], dir.path());
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("no flutter"));
    let trace = dir.path().join("clamped_convergence_flutter_trace.csv");
    let indicator = numbers(&trace, "indicator");
    assert!(!indicator.is_empty());
    assert!(indicator.iter().all(|&v| v <= COMPLEX_TOLERANCE));
    assert!(!dir.path().join("clamped_convergence_flutter.csv").exists());
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.toml");
    let o = run(&["modes", "--config", missing.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);

    let bad = patched("angle_ply_modes.toml", "n_modes = 0", dir.path());
    let o = run(&["modes", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("solver.n_modes"), "{}", stderr(&o));

    let cfg = config("angle_ply_modes.toml");
    let o = run(&["modes", "--config", cfg.to_str().unwrap(), "--mesh", "0", "4"], dir.path());
    assert_eq!(code(&o), 2, "{}", stderr(&o));

    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--axis", "mach", "--values", "2"], dir.path());
    assert_eq!(code(&o), 2, "{}", stderr(&o));

    // unknown flag, rejected by the argument parser
    let o = run(&["modes", "--config", cfg.to_str().unwrap(), "--bogus"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn parse_errors_carry_a_position() {
    let text = "[geometry]\na = 1.0\nb = = 2\n";
    match parse_config(text) {
        Err(ConfigError::Parse { line, column, .. }) => {
            assert_eq!(line, 3);
            assert!(column >= 1);
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}
