use std::io::Write;
use std::process::{Command, Output, Stdio};

use saruma::series::read_csv;
use saruma::{ExpandedModel, FitReport, PacfSeq, ResidualSet, SarumaSpec, UnitRootFactorization};
use serde_json::Value;

fn saruma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_saruma"))
        .args(args)
        .output()
        .unwrap()
}

fn saruma_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_saruma"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn ok_stdout(out: &Output) -> String {
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn factor_splits_pinned_pacf() {
    let out = ok_stdout(&saruma(&[
        "factor",
        "--pacf",
        r#"{"values":[1,-0.5],"unit_pins":[1]}"#,
    ]));
    let f: UnitRootFactorization = serde_json::from_str(&out).unwrap();
    assert_eq!(f.unit_factors.len(), 1);
    assert_eq!(f.unit_factors[0].coeffs(), &[1.0, -1.0]);
    assert_eq!(f.stationary_factor.coeffs(), &[1.0, -0.5]);
}

#[test]
fn pacf2ar_unit_pair() {
    let out = ok_stdout(&saruma(&[
        "pacf2ar",
        "--pacf",
        r#"{"values":[0.5,-1],"unit_pins":[2]}"#,
    ]));
    let v: Vec<f64> = serde_json::from_str(&out).unwrap();
    assert_eq!(v, vec![1.0, -1.0, 1.0]);
}

#[test]
fn outputs_round_trip_through_readers() {
    let pacf = r#"{"values":[0.3,-0.2,0.1]}"#;
    let coeffs = ok_stdout(&saruma(&["pacf2ar", "--pacf", pacf]));
    let back = ok_stdout(&saruma_stdin(&["ar2pacf"], &coeffs));
    let seq: PacfSeq = serde_json::from_str(&back).unwrap();
    let expected = [0.3, -0.2, 0.1];
    assert!(seq
        .values()
        .iter()
        .zip(expected)
        .all(|(a, b)| (a - b).abs() < 1e-12));

    let spec = r#"{"s":4,"sigma2":2,"U":[[1,-1]],"U_s":[[1,-1]],"phi":[1,-0.4],"theta_s":[1,0.3]}"#;
    let expanded = ok_stdout(&saruma(&["expand", "--spec", spec]));
    let e: ExpandedModel = serde_json::from_str(&expanded).unwrap();
    assert_eq!(e.ar_full.degree(), 6);
    assert_eq!(e.nonstationary_degree, 5);
    let parsed: SarumaSpec = serde_json::from_str(spec).unwrap();
    assert_eq!(
        serde_json::from_str::<SarumaSpec>(&serde_json::to_string(&parsed).unwrap()).unwrap(),
        parsed
    );

    let violations = ok_stdout(&saruma(&["validate", "--spec", spec]));
    assert_eq!(
        serde_json::from_str::<Value>(&violations).unwrap(),
        Value::Array(vec![])
    );
}

#[test]
fn simulate_then_residuals_recovers_innovations() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("y.csv");
    let innov = dir.path().join("e.csv");
    let spec = r#"{"s":1,"sigma2":1.5,"U":[[1,-1]],"phi":[1,-0.6,0.2],"theta":[1,0.4]}"#;
    let sim = saruma(&[
        "--seed",
        "42",
        "simulate",
        "--spec",
        spec,
        "--len",
        "400",
        "--burn-in",
        "50",
        "--innovations",
        innov.to_str().unwrap(),
        "-o",
        series.to_str().unwrap(),
    ]);
    ok_stdout(&sim);
    let out = ok_stdout(&saruma(&[
        "residuals",
        "--spec",
        spec,
        "--data",
        series.to_str().unwrap(),
    ]));
    let r: ResidualSet = serde_json::from_str(&out).unwrap();
    let e = read_csv(&innov).unwrap();
    let k = 3;
    assert_eq!(r.effective_n, 400 - k);
    let settle = 100;
    let worst = (settle..400)
        .map(|t| (r.residuals[t - k] - e.values()[t]).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6, "max error {worst}");
}

#[test]
fn seeded_runs_are_deterministic() {
    let spec = r#"{"s":1,"sigma2":1,"phi":[1,-0.5]}"#;
    let a = ok_stdout(&saruma(&[
        "simulate", "--spec", spec, "--len", "50", "--seed", "9",
    ]));
    let b = ok_stdout(&saruma(&[
        "simulate", "--spec", spec, "--len", "50", "--seed", "9",
    ]));
    let c = ok_stdout(&saruma(&[
        "simulate", "--spec", spec, "--len", "50", "--seed", "10",
    ]));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn fit_from_layout_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("y.csv");
    let spec = r#"{"s":1,"sigma2":1,"U":[[1,-1]],"phi":[1,-0.5]}"#;
    ok_stdout(&saruma(&[
        "--seed",
        "4",
        "simulate",
        "--spec",
        spec,
        "--len",
        "500",
        "-o",
        series.to_str().unwrap(),
    ]));
    let layout = r#"{"ar":[{"pinned":1},{"free":0}]}"#;
    let out = ok_stdout(&saruma(&[
        "fit",
        "--template",
        layout,
        "--data",
        series.to_str().unwrap(),
        "--multistarts",
        "2",
    ]));
    let report: FitReport = serde_json::from_str(&out).unwrap();
    assert_eq!(report.ar.unit_pins().collect::<Vec<_>>(), vec![1]);
    assert!(
        (report.spec.phi.coeffs()[1] + 0.5).abs() < 0.15,
        "{:?}",
        report.spec.phi
    );
}

#[test]
fn domain_error_is_json_with_exit_one() {
    let out = saruma(&["ar2pacf", "--poly", "[1,0,0,-1]"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["error"], "UnitPacfEncountered");
    assert_eq!(err["index"], 3);
}

#[test]
fn usage_error_exits_two() {
    assert_eq!(saruma(&["pacf2ar", "--bogus"]).status.code(), Some(2));
    assert_eq!(saruma(&[]).status.code(), Some(2));
}
