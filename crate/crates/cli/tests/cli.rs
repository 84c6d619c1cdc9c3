use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fracopt::{assemble, Grid, KernelParams, MatrixDump};
use tempfile::TempDir;

fn fracopt(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracopt"))
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

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().to_string()).collect()
}

#[test]
fn solve_writes_one_result_row() {
    let dir = TempDir::new().unwrap();
    let o = fracopt(&["--domain", "interval:-1,1,64", "--s", "0.5"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert_eq!(column(&csv, "cells"), ["64"]);
    let lambda: f64 = column(&csv, "lambda1")[0].parse().unwrap();
    assert!(lambda > 7.0 && lambda < 7.6, "{lambda}");
    let sol = fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert_eq!(sol.lines().count(), 65);
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("PASS residual"));
    assert!(!report.contains("FAIL"));
}

#[test]
fn minimize_trace_is_monotone() {
    let dir = TempDir::new().unwrap();
    let o = fracopt(
        &[
            "--domain", "disk:1,12", "--s", "0.4", "--weights", "w:1@0.35,-1@0.65",
            "--mode", "minimize", "--restarts", "3",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mu: Vec<f64> = column(&trace, "mu1").iter().map(|v| v.parse().unwrap()).collect();
    assert!(!mu.is_empty());
    assert!(mu.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)));
    let results = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 4);
}

#[test]
fn maximize_reports_gap() {
    let dir = TempDir::new().unwrap();
    let o = fracopt(
        &[
            "--domain", "interval:-1,1,24", "--s", "0.5", "--weights", "w:1@0.5,0@0.5",
            "--mode", "maximize", "--tol", "1e-3",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("iter,mu1,lambda1,lin_obj,cells_changed,rho_sym_err,u_sym_err,gap,majorized"));
}

#[test]
fn verify_suite_exit_code_matches_report() {
    let dir = TempDir::new().unwrap();
    let o = fracopt(
        &[
            "--domain", "rect:2,1,12,6", "--s", "0.5", "--weights", "w:2@0.5,-1@0.5",
            "--mode", "verify-suite",
        ],
        dir.path(),
    );
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    for name in [
        "convexity",
        "Hardy-Littlewood",
        "Polya-Szego",
        "two-sided rearrangement bound",
        "upper bound",
        "Gateaux derivative",
        "negative eigenvalue duality",
    ] {
        assert!(report.contains(&format!(" {name}: ")), "missing {name}");
    }
    let failed = report.lines().any(|l| l.starts_with("FAIL"));
    assert_eq!(code(&o), if failed { 2 } else { 0 });
    assert!(!failed, "{report}");
    let csv = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert!(csv.starts_with("check,verdict,value\n"));
}

#[test]
fn bad_fractions_are_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = fracopt(
        &[
            "--domain", "interval:-1,1,16", "--s", "0.5", "--weights", "w:1@0.6,-1@0.5",
            "--mode", "minimize",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("1.1"), "{}", stderr(&o));
}

#[test]
fn missing_s_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = fracopt(&["--domain", "interval:-1,1,16"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("missing --s"));
}

#[test]
fn conflicting_domains_are_rejected() {
    let dir = TempDir::new().unwrap();
    let o = fracopt(
        &["--domain", "interval:-1,1,16", "--domain", "disk:1,8", "--s", "0.5"],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("conflicting domain"));
}

#[test]
fn runs_are_deterministic() {
    let args = [
        "--domain", "disk:1,10", "--s", "0.6", "--weights", "w:1@0.3,-0.5@0.7",
        "--mode", "minimize", "--restarts", "4", "--seed", "7",
    ];
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    assert_eq!(code(&fracopt(&args, a.path())), 0);
    assert_eq!(code(&fracopt(&args, b.path())), 0);
    for f in ["results.csv", "trace.csv", "solution.csv", "report.txt"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn matrix_dump_round_trips() {
    let dir = TempDir::new().unwrap();
    let o = fracopt(
        &["--domain", "rect:1,1,6,6", "--s", "0.3", "--dump-matrix"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let bytes = fs::read(dir.path().join("A.bin")).unwrap();
    let dump = MatrixDump::read_from(bytes.as_slice()).unwrap();
    let grid = Grid::from_spec("rect:1,1,6,6").unwrap();
    let op = assemble(&grid, KernelParams::new(0.3, 2).unwrap()).unwrap();
    assert_eq!(dump, op.dump());
    assert_eq!(dump.n, 36);
}

#[test]
fn json_config_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"domain": "interval:-1,1,32", "s": 0.5, "weights": "w:1@0.5,-1@0.5", "mode": "minimize"}"#,
    )
    .unwrap();
    let o = fracopt(&["--config", cfg.to_str().unwrap(), "--s", "0.25"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("s = 0.25\n"));
    assert!(report.contains("mode = minimize\n"));

    fs::write(&cfg, r#"{"domain": "interval:-1,1,32", "s": 0.5, "colour": 1}"#).unwrap();
    let o = fracopt(&["--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
}
