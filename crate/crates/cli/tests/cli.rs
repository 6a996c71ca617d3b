//! End-to-end tests through the built binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use grushin_hardy_cli::VerificationReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grushin-hardy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("grushin-hardy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> PathBuf {
    let p = tmp(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const IDENTITY: &str = r#"
p = 2.0
seed = 3
checks = ["identity", "inequality"]

[space]
m = 1
k = 1
gamma = 1.0

[pair]
id = "dambrosio_power"
alpha = 0.0
beta = 0.0

[field]
phase_kappa = 1.0

[quadrature]
rel_tol = 1e-8
"#;

#[test]
fn identity_config_passes() {
    let cfg = write("identity.toml", IDENTITY);
    let o = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = VerificationReport::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.checks.len(), 2);
    assert!(r.checks[0]
        .name
        .starts_with("identity/dambrosio_power/p=2/(1,1,1)/phase_twisted"));
    assert!(r.all_passed());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["config", "checks", "summary"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    for key in ["name", "passed", "terms", "residual", "quadrature_error"] {
        assert!(v["checks"][0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn invalid_pair_exits_two_with_constraint() {
    let bad = IDENTITY.replace("alpha = 0.0", "alpha = 3.5");
    let cfg = write("bad.toml", &bad);
    let o = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("requires Q > α−β"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn empty_check_list_gives_empty_report() {
    let cfg = write(
        "empty.toml",
        &IDENTITY.replace(r#"checks = ["identity", "inequality"]"#, "checks = []"),
    );
    let o = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = VerificationReport::from_json(&stdout(&o)).unwrap();
    assert!(r.checks.is_empty());
    assert_eq!((r.summary.passed, r.summary.failed), (0, 0));
}

#[test]
fn failing_check_exits_one() {
    // Two levels leave the log pair far from its sharp constant.
    let o = run(&["sharpness", "--pair", "log_ball", "--levels", "2"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn flags_override_the_file() {
    let cfg = write("override.toml", IDENTITY);
    let o = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--p",
        "3",
        "--rel-tol",
        "1e-7",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = VerificationReport::from_json(&stdout(&o)).unwrap();
    assert!(r.checks[0].name.contains("p=3"));
    let grushin_hardy_cli::ConfigEcho::Single(c) = r.config else {
        panic!("single config expected")
    };
    assert_eq!((c.p, c.quadrature.rel_tol), (3.0, 1e-7));
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let cfg = write("det.toml", IDENTITY);
    let a = run(&["verify", "--config", cfg.to_str().unwrap()]);
    let b = run(&[
        "--threads",
        "1",
        "verify",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    let c = run(&[
        "--threads",
        "3",
        "verify",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    let det = |o: &Output| {
        VerificationReport::from_json(&stdout(o))
            .unwrap()
            .deterministic_json()
            .unwrap()
    };
    assert_eq!(det(&a), det(&b));
    assert_eq!(det(&a), det(&c));
}

#[test]
fn export_round_trip_and_csv_rows() {
    let cfg = write("export.toml", IDENTITY);
    let json = tmp("export.json");
    let table = tmp("export_table.csv");
    let o = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        json.to_str().unwrap(),
        "--emit-table",
        table.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let original = VerificationReport::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();

    let again = tmp("again.json");
    let o = run(&[
        "export",
        "--in",
        json.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let reread = VerificationReport::from_json(&std::fs::read_to_string(&again).unwrap()).unwrap();
    assert_eq!(reread, original);

    let csv_path = tmp("export.csv");
    let o = run(&[
        "export",
        "--in",
        json.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    for path in [&csv_path, &table] {
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text.lines().count(), 1 + original.checks.len());
    }

    let o = run(&[
        "export",
        "--in",
        json.to_str().unwrap(),
        "--format",
        "xml",
        "--out",
        "x",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&[
        "export",
        "--in",
        json.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        "/nonexistent/dir/r.json",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot write"));
}

fn constant(kind: &str, p: &str) -> Vec<f64> {
    let o = run(&["constants", "--kind", kind, "--p", p]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    row.split('\t')
        .skip(2)
        .map(|v| v.parse().unwrap())
        .collect()
}

#[test]
fn constants_examples() {
    let cp2 = constant("cp", "2");
    assert!((cp2[0] - 1.0).abs() < 1e-10);
    assert!(constant("c3", "1.5")[0] <= 0.375);

    let golden: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/cp_dense_grid.json"),
        )
        .unwrap(),
    )
    .unwrap();
    let g = golden["values"]["4"].as_f64().unwrap();
    let cp4 = constant("cp", "4");
    let (lo, hi) = (cp4[3], cp4[4]);
    assert!(lo <= g && g <= hi, "{g} not in [{lo}, {hi}]");
}

#[test]
fn constants_reject_bad_input() {
    assert_eq!(
        run(&["constants", "--kind", "c1", "--p", "2.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["constants", "--kind", "c9", "--p", "1.5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn small_subcommands() {
    let o = run(&[
        "check-divergence",
        "--space",
        "2,1,0",
        "--samples",
        "50",
        "--seed",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("max relative error"));
    let o = run(&["condition", "--pair", "nch_ball", "--samples", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&["sharpness", "--pair", "dambrosio_power", "--levels", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(
        stdout(&o).lines().filter(|l| !l.starts_with('#')).count(),
        4
    );
    assert_eq!(
        run(&["check-divergence", "--space", "0,1,0"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["condition", "--pair", "nope"]).status.code(), Some(2));
}

const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/verify_all.json");

fn close(a: &serde_json::Value, b: &serde_json::Value, path: &str) {
    use serde_json::Value::*;
    match (a, b) {
        (Number(x), Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!(
                (x - y).abs() <= 1e-9 * x.abs().max(y.abs()) + 1e-15,
                "{path}: {x} vs {y}"
            );
        }
        (Object(x), Object(y)) => {
            assert_eq!(
                x.keys().collect::<Vec<_>>(),
                y.keys().collect::<Vec<_>>(),
                "{path}"
            );
            for (k, v) in x {
                close(v, &y[k], &format!("{path}.{k}"));
            }
        }
        (Array(x), Array(y)) => {
            assert_eq!(x.len(), y.len(), "{path}");
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                close(u, v, &format!("{path}[{i}]"));
            }
        }
        _ => assert_eq!(a, b, "{path}"),
    }
}

/// Set UPDATE_GOLDEN=1 to rewrite the committed report.
#[test]
fn verify_all_matches_golden_report() {
    let out = tmp("all.json");
    let o = run(&["verify", "--all", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = VerificationReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.all_passed());
    let fresh = report.deterministic_json().unwrap();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(GOLDEN, &fresh).unwrap();
    }
    let golden: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(GOLDEN).unwrap()).unwrap();
    close(&serde_json::from_str(&fresh).unwrap(), &golden, "report");
}
