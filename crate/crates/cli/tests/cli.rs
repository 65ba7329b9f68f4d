//! End-to-end tests of the binary: config parsing, CSV outputs, exit
//! codes, and byte-level idempotence.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathlap"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, contents: &str) {
    std::fs::write(dir.join(name), contents).unwrap();
}

const OU_CONFIG: &str = r#"
[process]
family = "gaussian"
s = 0.0
lambda_s = 1.0

[process.coefficients]
alpha = { kind = "constant", value = 0.0 }
beta = { kind = "constant", value = 1.0 }
sigma = { kind = "constant", value = 1.0 }

[task.eval]
t = 1.0
x_grid = [0.0, 1.0]

[task.verify]
t = 1.0
x_grid = [1.0]

[task.price]
maturities = [0.0, 1.0]

[numerics.mc]
n_paths = 20000
"#;

const CP_CONFIG: &str = r#"
[process]
family = "compound_poisson"
theta = 1.0
lambda_s = 0.0

[process.jump]
kind = "exponential"
kappa = 1.0

[task.eval]
t = 1.0
x_grid = [0.0, 1.0]

[task.verify]
t = 1.0
x_grid = [0.5, 1.0]

[task.invert]
t = 1.0
grid_min = 0.0
grid_max = 3.0
grid_points = 31
remove_atom = true

[numerics.mc]
n_paths = 30000
"#;

#[test]
fn eval_writes_normalized_row_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "run.toml", OU_CONFIG);
    let out = run(&["eval", "--config", "run.toml", "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("o/eval.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# family=gaussian route=auto"));
    assert_eq!(lines.next().unwrap(), "x,re_phi,im_phi");
    assert_eq!(lines.next().unwrap(), "0,1,0");
    // OU φ(1) = exp(−M + V/2) with the constant-coefficient closed forms
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    let m = 1.0 - (-1.0_f64).exp();
    let v = 0.5 * (2.0 - 3.0 + 4.0 * (-1.0_f64).exp() - (-2.0_f64).exp());
    assert!((row[1] - (-m + v / 2.0).exp()).abs() < 1e-9);
    assert!(row[2].abs() < 1e-12);
}

#[test]
fn cp_eval_and_verify_pass() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "run.toml", CP_CONFIG);
    let out = run(&["eval", "--config", "run.toml", "--out", "o"], dir.path());
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("o/eval.csv")).unwrap();
    let phi1: f64 = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((phi1 - 2.0 / std::f64::consts::E).abs() < 1e-9);

    let out = run(&["verify", "--config", "run.toml", "--out", "o"], dir.path());
    assert!(
        out.status.success(),
        "verify failed: {}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let table = std::fs::read_to_string(dir.path().join("o/verify.csv")).unwrap();
    assert!(table.contains("closed"));
    assert!(!table.contains("FAIL"));
}

#[test]
fn outputs_are_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "run.toml", CP_CONFIG);
    assert!(run(&["invert", "--config", "run.toml", "--out", "a"], dir.path())
        .status
        .success());
    assert!(run(&["invert", "--config", "run.toml", "--out", "b"], dir.path())
        .status
        .success());
    let a = std::fs::read(dir.path().join("a/cdf.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/cdf.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn price_command_emits_unit_price_at_zero_maturity() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "run.toml", OU_CONFIG);
    let out = run(&["price", "--config", "run.toml", "--out", "o"], dir.path());
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("o/price.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "0,1"));
}

#[test]
fn survival_emits_one_curve_per_state() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "run.toml",
        r#"
[process]
family = "gamma_ou"
kappa = 1.0
alpha = 1.0
beta = 1.0
lambda_s = 0.0

[task.survival]
t = 1.0
tenors = [0.5, 1.0, 2.0]
states = [0.1, 2.0]
"#,
    );
    let out = run(&["survival", "--config", "run.toml", "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let c0 = std::fs::read_to_string(dir.path().join("o/survival_0.csv")).unwrap();
    let c1 = std::fs::read_to_string(dir.path().join("o/survival_1.csv")).unwrap();
    assert_ne!(c0, c1, "conditioning states must produce distinct curves");
    for text in [&c0, &c1] {
        let last: f64 = text
            .lines()
            .last()
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        assert!(last > 0.0 && last <= 1.0);
    }
}

#[test]
fn calibrate_round_trips_a_generated_curve() {
    let dir = tempfile::tempdir().unwrap();
    // curve generated by a flat 4% rate
    let curve: String = [1.0f64, 2.0, 5.0, 10.0]
        .iter()
        .map(|t| format!("{t},{}\n", (-0.04 * t).exp()))
        .collect();
    write(dir.path(), "curve.csv", &curve);
    write(
        dir.path(),
        "run.toml",
        r#"
[process]
family = "gaussian"
[process.coefficients]
alpha = { kind = "constant", value = 0.0 }
beta = { kind = "constant", value = 1.0 }
sigma = { kind = "constant", value = 0.0 }

[task.calibrate]
family = "constant_rate"
curve_file = "curve.csv"
bounds = [[0.0, 0.2]]
"#,
    );
    let out = run(&["calibrate", "--config", "run.toml", "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.path().join("o/calibration.csv")).unwrap();
    let lambda: f64 = report
        .lines()
        .find(|l| l.starts_with("lambda,"))
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((lambda - 0.04).abs() < 1e-6, "recovered {lambda}");
}

#[test]
fn exit_codes_for_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();

    // missing config file → 2
    let out = run(&["eval", "--config", "absent.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // malformed TOML → 2
    write(dir.path(), "bad.toml", "[process\nfamily=");
    let out = run(&["eval", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // unknown family → 2
    write(
        dir.path(),
        "fam.toml",
        "[process]\nfamily = \"unknown\"\n[task.eval]\nt = 1.0\nx_grid = [0.0]\n",
    );
    let out = run(&["eval", "--config", "fam.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // numeric failure: gamma-OU transform straight through the pole → 3
    write(
        dir.path(),
        "pole.toml",
        r#"
[process]
family = "gamma_ou"
kappa = 1.0
alpha = 1.0
beta = 1.0
lambda_s = 0.0

[task.eval]
t = 1.0
x_grid = [-1.0]
"#,
    );
    let out = run(&["eval", "--config", "pole.toml"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    // verification failure → 4 (absurd tolerance)
    write(
        dir.path(),
        "tight.toml",
        &CP_CONFIG.replace(
            "[task.verify]\nt = 1.0\nx_grid = [0.5, 1.0]",
            "[task.verify]\nt = 1.0\nx_grid = [0.5, 1.0]\ntolerance = 1e-18\nseries_tolerance = 1e-18\nskip_mc = true",
        ),
    );
    let out = run(&["verify", "--config", "tight.toml", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn route_flag_selects_evaluation_path() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "run.toml", CP_CONFIG);
    for route in ["closed", "quad", "series", "mc"] {
        let out = run(
            &["eval", "--config", "run.toml", "--out", route, "--route", route],
            dir.path(),
        );
        assert!(out.status.success(), "route {route}");
        let csv = std::fs::read_to_string(dir.path().join(route).join("eval.csv")).unwrap();
        assert!(csv.starts_with(&format!("# family=compound_poisson route={route}")));
        let phi1: f64 = csv
            .lines()
            .last()
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        let tol = if route == "mc" { 5e-3 } else { 1e-6 };
        assert!(
            (phi1 - 2.0 / std::f64::consts::E).abs() < tol,
            "route {route}: {phi1}"
        );
    }
}

#[test]
fn verify_covers_gaussian_quadrature_vs_mc() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "run.toml", OU_CONFIG);
    let out = run(&["verify", "--config", "run.toml", "--out", "o"], dir.path());
    assert!(
        out.status.success(),
        "{}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let table = std::fs::read_to_string(dir.path().join("o/verify.csv")).unwrap();
    assert!(table.contains("mc_stderr"));
    assert!(!table.contains("FAIL"));
}
