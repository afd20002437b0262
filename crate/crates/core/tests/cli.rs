use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use mosob::analysis::{Domain, Grid, GridFunction};

fn mosob(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mosob"))
        .args(args)
        .current_dir(dir)
        .env_remove("MOSOB_PHI")
        .env_remove("MOSOB_CONFIG")
        .env_remove("MOSOB_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL_RUN: &str = r#"
seed = 7

[experiment]
resolution = 48
levels = 8
"#;

#[test]
fn weak_type_passes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), SMALL_RUN).unwrap();
    let o = mosob(&["--config", "run.toml", "verify", "--exp", "weak-type", "--out", "reports"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for ext in ["json", "csv", "gp"] {
        assert!(dir.path().join(format!("reports/weak-type.{ext}")).exists(), "missing .{ext}");
    }
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("reports/weak-type.json")).unwrap()).unwrap();
    assert_eq!(rep["pass"], true);
}

#[test]
fn missing_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = mosob(&["--config", "absent.toml", "verify", "--exp", "weak-type"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("absent.toml"));
}

#[test]
fn necessity_in_the_divergent_regime() {
    let dir = tempfile::tempdir().unwrap();
    let o = mosob(&["--n", "2", "verify", "--exp", "necessity"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let notes = rep["notes"].to_string();
    assert!(notes.contains("divergence demonstrated"), "{notes}");
}

#[test]
fn exponent_range_below_one_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let doc = r#"{"family": "variable-exponent", "n": 2,
        "fields": [{"name": "p", "kind": "expression", "payload": "1.25 + 0.75*sin(x1)", "range": [0.5, 2]}]}"#;
    std::fs::write(dir.path().join("phi.json"), doc).unwrap();
    let o = mosob(&["--phi", "phi.json", "conditions"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("fields[0].range"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_names_its_path() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "[experiment]\nresolutoin = 4\n").unwrap();
    let o = mosob(&["--config", "run.toml", "verify", "--exp", "weak-type"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("experiment"), "{}", stderr(&o));
}

#[test]
fn conjugate_matches_the_power_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let o = mosob(&["--normalize", "none", "conjugate", "--t-grid", "1e-3:1e3:13"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "x1,x2,t,H,H_inv,phi_conj,oracle,ratio");
    for line in lines {
        let ratio: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((ratio - 1.0).abs() < 1e-6, "{line}");
    }
}

#[test]
fn tightened_oracle_tolerance_is_a_violation() {
    // The generic conjugate agrees with the closed form to ~1e-13, not 1e-300.
    let dir = tempfile::tempdir().unwrap();
    let o = mosob(&["--normalize", "none", "--tol-oracle", "1e-300", "conjugate"], dir.path());
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn environment_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_mosob"))
        .args(["conjugate", "--t-grid", "1:10:2"])
        .current_dir(dir.path())
        .env("MOSOB_NORMALIZE", "bogus")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn grid_function_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = Arc::new(Grid::tensor(&Domain::cube(2, -1.0, 1.0).unwrap(), 4).unwrap());
    let u = GridFunction::from_fn(g, |x| 1.0 - 0.5 * (x[0] * x[0] + x[1] * x[1]));
    u.write_csv(&dir.path().join("u.csv")).unwrap();
    for cmd in ["norm", "riesz", "maximal"] {
        let o = mosob(&[cmd, "--input", "u.csv"], dir.path());
        assert_eq!(code(&o), 0, "{cmd}: {}", stderr(&o));
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("runtime_s");
        v
    };
    let a = mosob(&["--seed", "5", "verify", "--exp", "necessity"], dir.path());
    let b = mosob(&["--seed", "5", "verify", "--exp", "necessity"], dir.path());
    assert_eq!(strip(&a), strip(&b));
}
