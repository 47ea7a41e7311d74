use std::path::Path;
use std::process::{Command, Output};

fn framediv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framediv"))
        .args(args)
        .env("FRAMEDIV_WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap()
}

#[test]
fn sympoly_suite_writes_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = framediv(&["run", "sympoly-identities", "--n", "5", "--samples", "10000", "--seed", "7", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));

    let csv = read(dir.path(), "summary.csv");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "identity,fixture,n_samples,worst_residual,bound,tolerance,pass"
    );
    assert!(lines.all(|l| l.ends_with(",true")));

    let jsonl = read(dir.path(), "report.jsonl");
    let first: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    for key in ["suite", "fixture", "sample", "residual", "tolerance", "verdict", "seed"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert_eq!(first["seed"], 7);
    assert_eq!(first["suite"], "sympoly-identities");
}

#[test]
fn identical_seeds_give_identical_reports() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = framediv(&["run", "sympoly-identities", "--samples", "300", "--seed", "3", "--out", d.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(read(a.path(), "report.jsonl"), read(b.path(), "report.jsonl"));
    assert_eq!(read(a.path(), "summary.csv"), read(b.path(), "summary.csv"));
}

#[test]
fn div_identity_on_round_sphere() {
    let o = framediv(&["run", "div-identity", "--metric", "round-s2", "--grid", "50x50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("PASS div-identity"));
    assert!(text.contains("PASS div-x-gauss-curvature"));
}

#[test]
fn polyfamily_upper_endpoint() {
    let o = framediv(&["run", "polyfamily-scan", "--q", "x^3-3x", "--endpoint", "upper"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("PASS blowup-upper"));
    assert!(!text.contains("lower"));
}

#[test]
fn verdict_failure_exits_one_with_failure_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = framediv(&[
        "run",
        "hypersurface-isoparametric",
        "--immersion",
        "perturbed-clifford",
        "--grid",
        "8",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let jsonl = read(dir.path(), "report.jsonl");
    assert!(jsonl
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .any(|v| v["identity"] == "mean-curvature-constancy" && v["verdict"] == "fail"));
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(framediv(&["run", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(framediv(&["run", "div-identity", "--metric", "nowhere"]).status.code(), Some(2));
    assert_eq!(framediv(&["run", "div-identity", "--grid", "5xq"]).status.code(), Some(2));
    assert_eq!(
        framediv(&["run", "polyfamily-scan", "--endpoint", "middle"]).status.code(),
        Some(2)
    );
    let o = Command::new(env!("CARGO_BIN_EXE_framediv"))
        .args(["run", "polyfamily-scan"])
        .env("FRAMEDIV_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        r#"
[run]
metric = "ripple"
grid = "12x12"

[metrics.ripple]
lo = [0, 0]
hi = ["2*pi", "2*pi"]
periodic = [true, true]
g = [["1 + 0.2*sin(x2)^2", "0.1*cos(x1)"], ["0.1*cos(x1)", "1"]]
"#,
    )
    .unwrap();
    let o = framediv(&["run", "div-identity", "--metric", "round-s2", "--grid", "3x3", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("ripple"));
    assert!(text.contains("n=144"));
    assert!(!text.contains("round-s2"));
}

#[test]
fn config_file_defines_tensor_and_immersion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("defs.toml");
    std::fs::write(
        &path,
        r#"
[tensors.t]
metric = "euclidean-2"
a = [["x1", "0"], ["0", "x2 + 3"]]

[immersions.sphere]
lo = [0.2, 0]
hi = ["pi - 0.2", "2*pi"]
periodic = [false, true]
f = ["sin(x1)*cos(x2)", "sin(x1)*sin(x2)", "cos(x1)", "0"]
"#,
    )
    .unwrap();
    let config = path.to_str().unwrap();
    let o = framediv(&["run", "codazzi-lemmas", "--tensor", "t", "--config", config]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let o = framediv(&["run", "hypersurface-isoparametric", "--immersion", "sphere", "--grid", "6", "--config", config]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8(o.stdout).unwrap().contains("PASS gauss-intrinsic"));
}

#[test]
fn malformed_config_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[run]\ngrid = 5x5\n").unwrap();
    let o = framediv(&["run", "div-identity", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let missing = dir.path().join("absent.toml");
    assert_eq!(
        framediv(&["run", "div-identity", "--config", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn list_names_every_suite() {
    let o = framediv(&["list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for s in [
        "div-identity",
        "codazzi-lemmas",
        "sympoly-identities",
        "polyfamily-scan",
        "hypersurface-isoparametric",
        "integrated-torus",
    ] {
        assert!(text.contains(s));
    }
}
